#include "rydcav/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

#include "rydcav/dynamics.hpp"
#include "rydcav/errors.hpp"
#include "rydcav/gate.hpp"
#include "rydcav/mcwf.hpp"
#include "rydcav/oracle.hpp"

namespace rydcav {

namespace {

PhysicalParams strong_coupling_preset() {
  PhysicalParams p;
  p.omega_rabi = angular_from_mhz(20.0);
  p.g_collective = angular_from_mhz(10.0);
  p.delta_e = angular_from_mhz(200.0);
  p.gamma_e = angular_from_mhz(1.0);
  p.gamma_r = angular_from_mhz(0.01);
  p.kappa = angular_from_mhz(0.5);
  return p;
}

PhysicalParams small_ladder_preset() {
  PhysicalParams p;
  p.g_collective = angular_from_mhz(1.0);
  p.omega_rabi = angular_from_mhz(4.0);
  p.delta_e = angular_from_mhz(10.0);
  p.gamma_e = angular_from_mhz(1.0);
  p.gamma_r = angular_from_mhz(0.2);
  p.kappa = angular_from_mhz(0.2);
  return p;
}

struct Populations {
  double b, e, r;
};

// Single-photon sector populations of a dense N-atom state.
Populations dense_populations(const FullSystemSpec& sys, const CVector& psi) {
  std::vector<int> lv(static_cast<std::size_t>(sys.n_atoms), kG);
  Populations out{std::norm(psi(static_cast<Eigen::Index>(full_index(sys, lv, 1)))), 0.0, 0.0};
  for (int k = 0; k < sys.n_atoms; ++k) {
    auto at = [&](int level) {
      std::vector<int> l = lv;
      l[static_cast<std::size_t>(k)] = level;
      return std::norm(psi(static_cast<Eigen::Index>(full_index(sys, l, 0))));
    };
    out.e += at(kE);
    out.r += at(kR);
  }
  return out;
}

double max_population_error(const FullSystemSpec& sys, const DenseTrajectory& dense,
                            const Trajectory& reduced) {
  if (dense.times.size() != reduced.times.size()) {
    throw NumericalError("dense and reduced sample grids differ");
  }
  double err = 0.0;
  for (std::size_t i = 0; i < dense.times.size(); ++i) {
    const Populations d = dense_populations(sys, dense.states[i]);
    const auto& s = reduced.states[i];
    err = std::max({err, std::abs(d.b - std::norm(s.c_b)), std::abs(d.e - std::norm(s.c_e)),
                    std::abs(d.r - std::norm(s.c_r))});
  }
  return err;
}

CVector single_photon_state(const FullSystemSpec& sys) {
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(full_dimension(sys)));
  psi(static_cast<Eigen::Index>(
      full_index(sys, std::vector<int>(static_cast<std::size_t>(sys.n_atoms), kG), 1))) = 1.0;
  return psi;
}

OracleCheck make_check(std::string name, double delta, double tol, std::string detail = {}) {
  return {std::move(name), delta <= tol ? CheckStatus::pass : CheckStatus::fail, delta, tol,
          std::move(detail)};
}

OracleCheck hermiticity_check(int n_atoms, int cutoff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FullSystemSpec sys = FullSystemSpec::uniform(n_atoms, 0.0, 0.0, cutoff);
  for (auto& g : sys.g) g = angular_from_mhz(5.0) * cplx(u(rng), u(rng));
  for (int i = 0; i < n_atoms; ++i) {
    for (int j = 0; j < i; ++j) sys.v(i, j) = sys.v(j, i) = angular_from_mhz(100.0) * u(rng);
  }
  PhysicalParams p = strong_coupling_preset();
  p.omega_rabi = angular_from_mhz(20.0) * cplx(u(rng), u(rng));
  p.delta_r = angular_from_mhz(3.0) * u(rng);
  const CMatrix h = build_hamiltonian(sys, p);
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  return make_check("hermiticity", asym, 1e-12,
                    "N=" + std::to_string(n_atoms) + " cutoff=" + std::to_string(cutoff) +
                        " dim=" + std::to_string(h.rows()));
}

OracleCheck adiabatic_check() {
  PhysicalParams p = strong_coupling_preset();
  p.g_collective = angular_from_mhz(5.0);  // delta_e = 40 g
  const FullSystemSpec sys = FullSystemSpec::uniform(1, p.g_collective, 0.0, 1);
  const CMatrix h_eff =
      effective_hamiltonian(build_hamiltonian(sys, p), collapse_operators(sys, p));
  const double t_end = 10.0;
  const auto dense = evolve_dense(h_eff, single_photon_state(sys), t_end, 0.0, DenseMethod::expm);
  IntegrationOptions o;
  o.t_end = t_end;
  o.dt = 1e-5;
  o.model = DynamicsModel::adiabatic;
  const auto reduced = integrate(SingleExcState::photon(), p, o);
  // The eliminated model cannot represent the initial |e> transient; compare b and r.
  double err = 0.0;
  for (std::size_t i = 0; i < dense.times.size(); ++i) {
    const Populations d = dense_populations(sys, dense.states[i]);
    const auto& s = reduced.states[i];
    err = std::max({err, std::abs(d.b - std::norm(s.c_b)), std::abs(d.r - std::norm(s.c_r))});
  }
  return make_check("adiabatic_elimination", err, 0.02, "N=1 delta_e=40g");
}

OracleCheck cavity_decay_check() {
  PhysicalParams p;
  p.kappa = angular_from_mhz(0.5);
  const FullSystemSpec sys = FullSystemSpec::uniform(1, 0.0, 0.0, 2);
  const CMatrix h = build_hamiltonian(sys, p);
  const auto ops = collapse_operators(sys, p);
  CMatrix rho0 = CMatrix::Zero(h.rows(), h.cols());
  const auto i2 = static_cast<Eigen::Index>(full_index(sys, {kG}, 2));
  rho0(i2, i2) = 1.0;
  const auto traj = lindblad_evolve(h, ops, rho0, 2.0, 1e-3, 0.05);
  const CMatrix n_op = photon_number_operator(sys);
  double err = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double n = (n_op * traj.states[i]).trace().real();
    err = std::max(err, std::abs(n - 2.0 * std::exp(-p.kappa * traj.times[i])));
  }
  return make_check("lindblad_cavity_decay", err, 1e-6, "<n>(t) vs 2 exp(-kappa t)");
}

OracleCheck unitary_limit_check() {
  PhysicalParams p;
  p.g_collective = angular_from_mhz(1.0);
  p.omega_rabi = angular_from_mhz(2.0);
  p.delta_e = angular_from_mhz(3.0);
  const FullSystemSpec sys = FullSystemSpec::uniform(1, p.g_collective, 0.0, 2);
  const CMatrix h = build_hamiltonian(sys, p);
  CVector psi0 = CVector::Zero(h.rows());
  psi0(static_cast<Eigen::Index>(full_index(sys, {kG}, 2))) = 1.0;
  const auto pure = evolve_dense(h, psi0, 1.0, 0.0, DenseMethod::expm, 0.05);
  const auto mixed = lindblad_evolve(h, {}, psi0 * psi0.adjoint(), 1.0, 1e-4, 0.05);
  double err = 0.0;
  for (std::size_t i = 0; i < pure.times.size(); ++i) {
    const CMatrix rho = pure.states[i] * pure.states[i].adjoint();
    err = std::max(err, (rho - mixed.states[i]).cwiseAbs().maxCoeff());
  }
  return make_check("lindblad_unitary_limit", err, 1e-8, "no collapse operators");
}

std::vector<OracleCheck> blockade_checks() {
  PhysicalParams p;
  p.g_collective = angular_from_mhz(2.0);
  p.omega_rabi = angular_from_mhz(20.0);
  p.delta_e = angular_from_mhz(20.0);
  auto max_rr = [&](double v_mhz) {
    const FullSystemSpec sys = FullSystemSpec::uniform(2, p.g_collective, angular_from_mhz(v_mhz), 2);
    CVector psi0 = CVector::Zero(static_cast<Eigen::Index>(full_dimension(sys)));
    psi0(static_cast<Eigen::Index>(full_index(sys, {kG, kG}, 2))) = 1.0;
    const auto traj =
        evolve_dense(build_hamiltonian(sys, p), psi0, 1.0, 0.0, DenseMethod::expm, 0.01);
    const auto rr = static_cast<Eigen::Index>(full_index(sys, {kR, kR}, 0));
    double m = 0.0;
    for (const auto& s : traj.states) m = std::max(m, std::norm(s(rr)));
    return m;
  };
  const double free = max_rr(0.0);
  const double blocked = max_rr(1e5);
  const double ratio = blocked > 0.0 ? free / blocked : std::numeric_limits<double>::infinity();
  std::vector<OracleCheck> out;
  OracleCheck sup{"blockade_suppression", ratio > 1e3 ? CheckStatus::pass : CheckStatus::fail,
                  ratio, 1e3,
                  "max |rr|^2 ratio (V=0 vs V=2pi x 1e5 MHz), two photons, 1 us"};
  out.push_back(sup);
  OracleCheck leak{"unblocked_rr_leakage",
                   free > 1e-3 ? CheckStatus::deviation : CheckStatus::pass, free, 1e-3,
                   "V=0 reaches doubly-Rydberg states absent from the reduced model"};
  out.push_back(leak);
  return out;
}

OracleCheck forster_doublet_check() {
  PhysicalParams p;
  p.delta_e = angular_from_mhz(100.0);
  const double v = angular_from_mhz(50.0);
  GateSystemSpec sys;
  sys.n_atoms = 1;
  sys.g = {0.0};
  sys.v = {v};
  sys.fock_cutoff = 0;
  const CMatrix h = build_gate_hamiltonian(sys, p);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  double dp = std::numeric_limits<double>::infinity(), dm = dp;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    dp = std::min(dp, std::abs(es.eigenvalues()(i) - v));
    dm = std::min(dm, std::abs(es.eigenvalues()(i) + v));
  }
  return make_check("forster_doublet", std::max(dp, dm) / v, 1e-12, "eigenvalues +-|V|");
}

OracleCheck forster_block_check() {
  PhysicalParams p = strong_coupling_preset();
  GateSystemSpec sys;
  sys.n_atoms = 2;
  sys.g = {angular_from_mhz(1.0), angular_from_mhz(1.0)};
  sys.v = {0.0, 0.0};
  const CMatrix h = build_gate_hamiltonian(sys, p);
  const int nf = sys.fock_cutoff + 1;
  double leak = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      const bool pi = (i / nf) % 2 == kQubitP, pj = (j / nf) % 2 == kQubitP;
      if (pi != pj) leak = std::max(leak, std::abs(h(i, j)));
    }
  }
  return make_check("forster_block_diagonal", leak, 0.0, "V=0 decouples the p' manifold");
}

OracleCheck weak_probe_check() {
  PhysicalParams p;
  p.n_atoms = 2;
  p.g_single = angular_from_mhz(3.0);
  p.g_collective = *p.g_single * std::sqrt(2.0);
  p.omega_rabi = angular_from_mhz(100.0);
  p.delta_e = angular_from_mhz(1000.0);
  p.gamma_e = angular_from_mhz(1.0);
  p.gamma_r = p.gamma_p = angular_from_mhz(0.01);
  p.kappa = angular_from_mhz(1.0);
  p = auto_two_photon_resonance(p);
  const std::vector<cplx> v = {angular_from_mhz(30.0), angular_from_mhz(20.0)};
  GateSystemSpec sys;
  sys.n_atoms = 2;
  sys.g = {*p.g_single, *p.g_single};
  sys.v = v;
  const cplx dense_blocked = weak_probe_reflection(sys, p, 0.0);
  sys.v = {0.0, 0.0};
  const cplx dense_free = weak_probe_reflection(sys, p, 0.0);
  const double err = std::max(std::abs(dense_blocked - reflection_blocked(p, 0.0, v)),
                              std::abs(dense_free - reflection_unblocked(p, 0.0)));
  return make_check("weak_probe_reflection", err, 0.01, "N=2, delta=0");
}

}  // namespace

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "PASS";
    case CheckStatus::fail:
      return "FAIL";
    case CheckStatus::deviation:
      return "DEVIATION";
  }
  return "?";
}

double collective_enhancement_error(int n_atoms, double pair_shift_mhz, double t_end) {
  const PhysicalParams p = strong_coupling_preset();
  const double g0 = p.g_collective / std::sqrt(static_cast<double>(n_atoms));
  const FullSystemSpec sys =
      FullSystemSpec::uniform(n_atoms, g0, angular_from_mhz(pair_shift_mhz), 1);
  const CMatrix h_eff =
      effective_hamiltonian(build_hamiltonian(sys, p), collapse_operators(sys, p));
  const auto dense = evolve_dense(h_eff, single_photon_state(sys), t_end, 0.0, DenseMethod::expm);
  IntegrationOptions o;
  o.t_end = t_end;
  o.dt = 1e-5;
  const auto reduced = integrate(SingleExcState::photon(), p, o);
  return max_population_error(sys, dense, reduced);
}

McwfLindbladComparison compare_mcwf_lindblad(std::size_t n_traj, std::uint64_t seed,
                                             unsigned workers) {
  const PhysicalParams p = small_ladder_preset();
  constexpr int kCutoff = 5;
  constexpr double kEnd = 5.0, kSample = 0.1;
  const FockLadderState psi0 = coherent_ladder({1.0, 0.0}, kCutoff, 1e-3);

  EnsembleOptions eo;
  eo.trajectory.t_end = kEnd;
  eo.trajectory.dt = 5e-4;
  eo.trajectory.sample_interval = kSample;
  eo.n_traj = n_traj;
  eo.master_seed = seed;
  eo.workers = workers;
  const EnsembleResult mc = ensemble_average(psi0, p, eo);

  const FullSystemSpec sys = FullSystemSpec::uniform(1, p.g_collective, 0.0, kCutoff);
  const CVector v = to_dense(psi0, sys);
  const auto lb = lindblad_evolve(build_hamiltonian(sys, p), collapse_operators(sys, p),
                                  v * v.adjoint(), kEnd, 0.0, kSample, DenseMethod::expm);
  if (lb.times.size() != mc.times.size()) throw NumericalError("sample grids differ");
  const CMatrix n_op = photon_number_operator(sys);
  const CMatrix r_op = level_population_operator(sys, kR);

  McwfLindbladComparison out;
  auto z = [](double diff, double se) {
    if (std::abs(diff) <= 1e-9) return 0.0;
    return se > 0.0 ? std::abs(diff) / se : std::numeric_limits<double>::infinity();
  };
  for (std::size_t i = 1; i < lb.times.size(); ++i) {
    const double n = (n_op * lb.states[i]).trace().real();
    const double r = (r_op * lb.states[i]).trace().real();
    const double dn = mc.mean_photon[i] - n, dr = mc.rydberg_pop[i] - r;
    out.max_abs_photon = std::max(out.max_abs_photon, std::abs(dn));
    out.max_abs_rydberg = std::max(out.max_abs_rydberg, std::abs(dr));
    out.max_z = std::max({out.max_z, z(dn, mc.stderr_photon[i]), z(dr, mc.stderr_rydberg[i])});
    ++out.samples;
  }
  return out;
}

std::vector<OracleCheck> run_oracle_suite(const OracleSuiteOptions& options) {
  if (options.max_atoms < 1 || options.max_atoms > kMaxOracleAtoms) {
    throw DimensionExceeded("oracle suite supports up to " + std::to_string(kMaxOracleAtoms) +
                            " atoms, requested " + std::to_string(options.max_atoms));
  }
  if (options.cutoff < 0 || options.cutoff > kMaxOracleCutoff) {
    throw DimensionExceeded("oracle suite supports Fock cutoff up to " +
                            std::to_string(kMaxOracleCutoff) + ", requested " +
                            std::to_string(options.cutoff));
  }
  if (options.mcwf_traces < 2) throw InvalidInput("oracle suite needs at least 2 trajectories");

  std::vector<OracleCheck> checks;
  checks.push_back(hermiticity_check(options.max_atoms, options.cutoff, options.seed));
  for (int n = 2; n <= options.max_atoms; ++n) {
    checks.push_back(make_check("collective_enhancement_N" + std::to_string(n),
                                collective_enhancement_error(n, 1e6, 5.0), 1e-3,
                                "g = sqrt(N) g0, V = 2pi x 1e6 MHz"));
  }
  checks.push_back(adiabatic_check());
  checks.push_back(cavity_decay_check());
  checks.push_back(unitary_limit_check());
  for (auto& c : blockade_checks()) checks.push_back(std::move(c));
  checks.push_back(forster_doublet_check());
  checks.push_back(forster_block_check());
  checks.push_back(weak_probe_check());
  const auto cmp = compare_mcwf_lindblad(options.mcwf_traces, options.seed, options.workers);
  checks.push_back(make_check("mcwf_vs_lindblad", cmp.max_z, 3.0,
                              std::to_string(options.mcwf_traces) + " trajectories, " +
                                  std::to_string(cmp.samples) + " samples"));
  return checks;
}

void write_oracle_report(std::ostream& out, const std::vector<OracleCheck>& checks) {
  for (const auto& c : checks) {
    out << to_string(c.status) << ' ' << c.name << " delta=" << format_double(c.delta)
        << " tol=" << format_double(c.tolerance);
    if (!c.detail.empty()) out << ' ' << c.detail;
    out << '\n';
  }
}

}  // namespace rydcav
