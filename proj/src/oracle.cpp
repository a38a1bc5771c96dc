#include "rydcav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "rydcav/errors.hpp"

namespace rydcav {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kTraceTolerance = 1e-8;

void check_full_spec(const FullSystemSpec& sys) {
  if (sys.n_atoms < 1 || sys.n_atoms > kMaxOracleAtoms) {
    throw DimensionExceeded("dense oracle supports 1.." + std::to_string(kMaxOracleAtoms) +
                            " atoms, got " + std::to_string(sys.n_atoms));
  }
  if (sys.fock_cutoff < 0 || sys.fock_cutoff > kMaxOracleCutoff) {
    throw DimensionExceeded("dense oracle supports Fock cutoff 0.." +
                            std::to_string(kMaxOracleCutoff) + ", got " +
                            std::to_string(sys.fock_cutoff));
  }
  if (sys.g.size() != static_cast<std::size_t>(sys.n_atoms)) {
    throw InvalidInput("need one coupling per atom");
  }
  if (sys.v.size() != 0) {
    if (sys.v.rows() != sys.n_atoms || sys.v.cols() != sys.n_atoms) {
      throw InvalidInput("pair interaction matrix must be n_atoms x n_atoms");
    }
    for (int i = 0; i < sys.n_atoms; ++i) {
      if (sys.v(i, i) != 0.0) throw InvalidInput("pair interaction diagonal must be zero");
      for (int j = 0; j < i; ++j) {
        if (sys.v(i, j) != sys.v(j, i)) throw InvalidInput("pair interaction must be symmetric");
      }
    }
  }
}

void check_gate_spec(const GateSystemSpec& sys) {
  if (sys.n_atoms < 1 || sys.n_atoms > kMaxOracleAtoms) {
    throw DimensionExceeded("gate oracle supports 1.." + std::to_string(kMaxOracleAtoms) +
                            " ensemble atoms, got " + std::to_string(sys.n_atoms));
  }
  if (sys.fock_cutoff < 0 || sys.fock_cutoff > kMaxOracleCutoff) {
    throw DimensionExceeded("gate oracle Fock cutoff out of range");
  }
  if (sys.g.size() != static_cast<std::size_t>(sys.n_atoms) ||
      sys.v.size() != static_cast<std::size_t>(sys.n_atoms)) {
    throw InvalidInput("need one coupling and one Forster term per ensemble atom");
  }
  if (gate_dimension(sys) > kMaxGateDimension) {
    throw DimensionExceeded("gate Hilbert space dimension " +
                            std::to_string(gate_dimension(sys)) + " exceeds " +
                            std::to_string(kMaxGateDimension));
  }
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::vector<int> digits(std::size_t code, std::size_t base, int count) {
  std::vector<int> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = static_cast<int>(code % base);
    code /= base;
  }
  return out;
}

std::size_t encode(const std::vector<int>& levels, std::size_t base) {
  std::size_t code = 0;
  for (std::size_t k = levels.size(); k-- > 0;) code = code * base + static_cast<std::size_t>(levels[k]);
  return code;
}

void check_step(const CMatrix& h, double dt) {
  const double norm = infinity_norm(h);
  const double bound = norm == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (50.0 * norm);
  if (!(dt > 0.0)) throw InvalidInput("dt must be > 0");
  if (dt > bound) {
    throw StepSizeTooLarge("dt = " + format_double(dt) + " us exceeds 1/(50 ||H||) = " +
                               format_double(bound) + " us",
                           bound);
  }
}

CMatrix lindblad_rhs(const CMatrix& h_eff, const std::vector<CMatrix>& ops, const CMatrix& rho) {
  CMatrix hr = h_eff * rho;
  CMatrix d = -I * hr + I * hr.adjoint();  // -i(H_eff rho - rho H_eff^dagger), rho Hermitian
  for (const auto& l : ops) d.noalias() += l * rho * l.adjoint();
  return d;
}

}  // namespace

FullSystemSpec FullSystemSpec::uniform(int n_atoms, double g0, double v0, int fock_cutoff) {
  FullSystemSpec s;
  s.n_atoms = n_atoms;
  s.fock_cutoff = fock_cutoff;
  s.g.assign(static_cast<std::size_t>(std::max(n_atoms, 0)), cplx(g0, 0.0));
  if (n_atoms > 0) {
    s.v = Eigen::MatrixXd::Constant(n_atoms, n_atoms, v0);
    s.v.diagonal().setZero();
  }
  return s;
}

std::size_t full_dimension(const FullSystemSpec& sys) {
  return ipow(3, sys.n_atoms) * static_cast<std::size_t>(sys.fock_cutoff + 1);
}

std::size_t full_index(const FullSystemSpec& sys, const std::vector<int>& levels, int photons) {
  return encode(levels, 3) * static_cast<std::size_t>(sys.fock_cutoff + 1) +
         static_cast<std::size_t>(photons);
}

CMatrix build_hamiltonian(const FullSystemSpec& sys, const PhysicalParams& p) {
  check_full_spec(sys);
  const std::size_t dim = full_dimension(sys);
  const int nf = sys.fock_cutoff + 1;
  const cplx omega = p.omega_rabi;
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t code = 0; code < ipow(3, sys.n_atoms); ++code) {
    const std::vector<int> lv = digits(code, 3, sys.n_atoms);
    for (int n = 0; n < nf; ++n) {
      const auto src = static_cast<Eigen::Index>(full_index(sys, lv, n));
      double diag = 0.0;
      for (int k = 0; k < sys.n_atoms; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        if (lv[ks] == kE) diag -= p.delta_e;
        if (lv[ks] == kR) diag -= p.delta_r;
        if (sys.v.size() != 0) {
          for (int l = k + 1; l < sys.n_atoms; ++l) {
            if (lv[ks] == kR && lv[static_cast<std::size_t>(l)] == kR) diag += sys.v(k, l);
          }
        }
        if (lv[ks] == kG && n >= 1) {
          std::vector<int> to = lv;
          to[ks] = kE;
          const auto dst = static_cast<Eigen::Index>(full_index(sys, to, n - 1));
          const cplx amp = -I * sys.g[ks] * std::sqrt(static_cast<double>(n));
          h(dst, src) += amp;
          h(src, dst) += std::conj(amp);
        }
        if (lv[ks] == kE) {
          std::vector<int> to = lv;
          to[ks] = kR;
          const auto dst = static_cast<Eigen::Index>(full_index(sys, to, n));
          h(dst, src) += -0.5 * omega;
          h(src, dst) += -0.5 * std::conj(omega);
        }
      }
      h(src, src) += diag;
    }
  }
  return h;
}

std::vector<CMatrix> collapse_operators(const FullSystemSpec& sys, const PhysicalParams& p) {
  check_full_spec(sys);
  const auto dim = static_cast<Eigen::Index>(full_dimension(sys));
  const int nf = sys.fock_cutoff + 1;
  std::vector<CMatrix> ops;
  auto atomic = [&](int k, int from, double rate) {
    CMatrix l = CMatrix::Zero(dim, dim);
    for (std::size_t code = 0; code < ipow(3, sys.n_atoms); ++code) {
      std::vector<int> lv = digits(code, 3, sys.n_atoms);
      if (lv[static_cast<std::size_t>(k)] != from) continue;
      std::vector<int> to = lv;
      to[static_cast<std::size_t>(k)] = kG;
      for (int n = 0; n < nf; ++n) {
        l(static_cast<Eigen::Index>(full_index(sys, to, n)),
          static_cast<Eigen::Index>(full_index(sys, lv, n))) = std::sqrt(rate);
      }
    }
    ops.push_back(std::move(l));
  };
  for (int k = 0; k < sys.n_atoms; ++k) {
    if (p.gamma_e > 0.0) atomic(k, kE, p.gamma_e);
    if (p.gamma_r > 0.0) atomic(k, kR, p.gamma_r);
  }
  if (p.kappa > 0.0) {
    CMatrix b = CMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const int n = static_cast<int>(i % nf);
      if (n >= 1) b(i - 1, i) = std::sqrt(p.kappa * n);
    }
    ops.push_back(std::move(b));
  }
  return ops;
}

CMatrix photon_number_operator(const FullSystemSpec& sys) {
  const auto dim = static_cast<Eigen::Index>(full_dimension(sys));
  const int nf = sys.fock_cutoff + 1;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = static_cast<double>(i % nf);
  return m;
}

CMatrix level_population_operator(const FullSystemSpec& sys, Level level) {
  const auto dim = static_cast<Eigen::Index>(full_dimension(sys));
  const std::size_t nf = static_cast<std::size_t>(sys.fock_cutoff + 1);
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto lv = digits(static_cast<std::size_t>(i) / nf, 3, sys.n_atoms);
    double count = 0.0;
    for (int l : lv) count += (l == level) ? 1.0 : 0.0;
    m(i, i) = count;
  }
  return m;
}

CMatrix effective_hamiltonian(const CMatrix& h, const std::vector<CMatrix>& collapse_ops) {
  CMatrix out = h;
  for (const auto& l : collapse_ops) out.noalias() -= 0.5 * I * (l.adjoint() * l);
  return out;
}

double infinity_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

DenseTrajectory evolve_dense(const CMatrix& h, const CVector& psi0, double t_end, double dt,
                             DenseMethod method, double sample_interval) {
  if (h.rows() != h.cols() || h.rows() != psi0.size()) {
    throw InvalidInput("evolve_dense: dimension mismatch");
  }
  if (!(t_end >= 0.0)) throw InvalidInput("t_end must be >= 0");
  if (!(sample_interval > 0.0)) throw InvalidInput("sample_interval must be > 0");
  DenseTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(psi0);

  if (method == DenseMethod::expm) {
    const auto samples = std::llround(t_end / sample_interval);
    const CMatrix u = (CMatrix(-I * h * sample_interval)).exp();
    CVector psi = psi0;
    for (long long k = 1; k <= samples; ++k) {
      psi = u * psi;
      traj.times.push_back(static_cast<double>(k) * sample_interval);
      traj.states.push_back(psi);
    }
    return traj;
  }

  check_step(h, dt);
  const auto steps = std::llround(t_end / dt);
  const long long stride = std::max<long long>(1, std::llround(sample_interval / dt));
  const CMatrix a = -I * h;
  CVector psi = psi0;
  for (long long k = 1; k <= steps; ++k) {
    const CVector k1 = a * psi;
    const CVector k2 = a * (psi + 0.5 * dt * k1);
    const CVector k3 = a * (psi + 0.5 * dt * k2);
    const CVector k4 = a * (psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (k % stride == 0 || k == steps) {
      traj.times.push_back(static_cast<double>(k) * dt);
      traj.states.push_back(psi);
    }
  }
  return traj;
}

CMatrix liouvillian(const CMatrix& h, const std::vector<CMatrix>& collapse_ops) {
  const Eigen::Index d = h.rows();
  const CMatrix h_eff = effective_hamiltonian(h, collapse_ops);
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix liou = CMatrix::Zero(d * d, d * d);
  auto add_kron = [&](const CMatrix& a, const CMatrix& bm, cplx scale) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (a(i, j) == cplx(0.0, 0.0)) continue;
        liou.block(i * d, j * d, d, d) += scale * a(i, j) * bm;
      }
    }
  };
  add_kron(id, h_eff, -I);
  add_kron(h_eff.conjugate(), id, I);
  for (const auto& l : collapse_ops) add_kron(l.conjugate(), l, 1.0);
  return liou;
}

LindbladTrajectory lindblad_evolve(const CMatrix& h, const std::vector<CMatrix>& collapse_ops,
                                   const CMatrix& rho0, double t_end, double dt,
                                   double sample_interval, DenseMethod method) {
  if (h.rows() != h.cols() || rho0.rows() != h.rows() || rho0.cols() != h.cols()) {
    throw InvalidInput("lindblad_evolve: dimension mismatch");
  }
  for (const auto& l : collapse_ops) {
    if (l.rows() != h.rows() || l.cols() != h.cols()) {
      throw InvalidInput("lindblad_evolve: collapse operator dimension mismatch");
    }
  }
  if (!(t_end >= 0.0)) throw InvalidInput("t_end must be >= 0");
  if (!(sample_interval > 0.0)) throw InvalidInput("sample_interval must be > 0");
  LindbladTrajectory traj;
  traj.min_eigenvalue = std::numeric_limits<double>::infinity();
  auto record = [&](double t, const CMatrix& rho) {
    const double err = std::abs(rho.trace() - 1.0);
    traj.max_trace_error = std::max(traj.max_trace_error, err);
    if (err > kTraceTolerance) {
      throw TraceError("density matrix trace drifted by " + format_double(err) + " at t = " +
                       format_double(t) + " us");
    }
    const CMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, es.eigenvalues().minCoeff());
    traj.times.push_back(t);
    traj.states.push_back(rho);
  };

  CMatrix rho = rho0;
  record(0.0, rho);

  if (method == DenseMethod::expm) {
    const Eigen::Index d = h.rows();
    if (d > 64) throw DimensionExceeded("superoperator exponential limited to dimension 64");
    const CMatrix prop = (CMatrix(liouvillian(h, collapse_ops) * sample_interval)).exp();
    const auto samples = std::llround(t_end / sample_interval);
    CVector v = Eigen::Map<const CVector>(rho.data(), d * d);
    for (long long k = 1; k <= samples; ++k) {
      v = prop * v;
      record(static_cast<double>(k) * sample_interval, Eigen::Map<const CMatrix>(v.data(), d, d));
    }
    return traj;
  }

  const CMatrix h_eff = effective_hamiltonian(h, collapse_ops);
  check_step(h_eff, dt);
  const auto steps = std::llround(t_end / dt);
  const long long stride = std::max<long long>(1, std::llround(sample_interval / dt));
  for (long long k = 1; k <= steps; ++k) {
    const CMatrix k1 = lindblad_rhs(h_eff, collapse_ops, rho);
    const CMatrix k2 = lindblad_rhs(h_eff, collapse_ops, rho + 0.5 * dt * k1);
    const CMatrix k3 = lindblad_rhs(h_eff, collapse_ops, rho + 0.5 * dt * k2);
    const CMatrix k4 = lindblad_rhs(h_eff, collapse_ops, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (k % stride == 0 || k == steps) record(static_cast<double>(k) * dt, rho);
  }
  return traj;
}

std::size_t gate_dimension(const GateSystemSpec& sys) {
  return ipow(4, sys.n_atoms) * 2 * static_cast<std::size_t>(sys.fock_cutoff + 1);
}

std::size_t gate_index(const GateSystemSpec& sys, const std::vector<int>& levels, int qubit,
                       int photons) {
  return (encode(levels, 4) * 2 + static_cast<std::size_t>(qubit)) *
             static_cast<std::size_t>(sys.fock_cutoff + 1) +
         static_cast<std::size_t>(photons);
}

CMatrix build_gate_hamiltonian(const GateSystemSpec& sys, const PhysicalParams& p) {
  check_gate_spec(sys);
  const auto dim = static_cast<Eigen::Index>(gate_dimension(sys));
  const int nf = sys.fock_cutoff + 1;
  const cplx omega = p.omega_rabi;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (std::size_t code = 0; code < ipow(4, sys.n_atoms); ++code) {
    const std::vector<int> lv = digits(code, 4, sys.n_atoms);
    for (int q = 0; q < 2; ++q) {
      for (int n = 0; n < nf; ++n) {
        const auto src = static_cast<Eigen::Index>(gate_index(sys, lv, q, n));
        double diag = 0.0;
        for (int k = 0; k < sys.n_atoms; ++k) {
          const auto ks = static_cast<std::size_t>(k);
          if (lv[ks] == kGateE) diag -= p.delta_e;
          if (lv[ks] == kGateR) diag -= p.delta_r;
          if (lv[ks] == kGateP && q == kQubitP) diag += p.delta_p;
          if (lv[ks] == kGateG && n >= 1) {
            std::vector<int> to = lv;
            to[ks] = kGateE;
            const auto dst = static_cast<Eigen::Index>(gate_index(sys, to, q, n - 1));
            const cplx amp = -I * sys.g[ks] * std::sqrt(static_cast<double>(n));
            h(dst, src) += amp;
            h(src, dst) += std::conj(amp);
          }
          if (lv[ks] == kGateE) {
            std::vector<int> to = lv;
            to[ks] = kGateR;
            const auto dst = static_cast<Eigen::Index>(gate_index(sys, to, q, n));
            h(dst, src) += -0.5 * omega;
            h(src, dst) += -0.5 * std::conj(omega);
          }
          if (lv[ks] == kGateP && q == kQubitP) {
            // V |r_k><p_k| (x) |r'><p'| and its conjugate.
            std::vector<int> to = lv;
            to[ks] = kGateR;
            const auto dst = static_cast<Eigen::Index>(gate_index(sys, to, kQubitR, n));
            h(dst, src) += sys.v[ks];
            h(src, dst) += std::conj(sys.v[ks]);
          }
        }
        h(src, src) += diag;
      }
    }
  }
  return h;
}

cplx weak_probe_reflection(const GateSystemSpec& sys_in, const PhysicalParams& p, double delta,
                           double drive_fraction) {
  GateSystemSpec sys = sys_in;
  sys.fock_cutoff = 1;
  if (!(p.kappa > 0.0)) throw InvalidInput("weak-probe reflection needs kappa > 0");
  const CMatrix h_full = build_gate_hamiltonian(sys, p);
  const int n_atoms = sys.n_atoms;

  // Sector reachable from |g..g, r', 0> by one probe photon.
  std::vector<Eigen::Index> basis;
  std::vector<int> excitations;
  for (std::size_t code = 0; code < ipow(4, n_atoms); ++code) {
    const auto lv = digits(code, 4, n_atoms);
    int excited = 0, p_count = 0;
    for (int l : lv) {
      excited += l != kGateG;
      p_count += l == kGateP;
    }
    for (int q = 0; q < 2; ++q) {
      if (p_count != (q == kQubitP ? 1 : 0)) continue;
      for (int n = 0; n < 2; ++n) {
        if (excited + n > 1) continue;
        basis.push_back(static_cast<Eigen::Index>(gate_index(sys, lv, q, n)));
        excitations.push_back(excited + n);
      }
    }
  }
  const auto d = static_cast<Eigen::Index>(basis.size());
  const std::vector<int> ground(static_cast<std::size_t>(n_atoms), kGateG);
  const auto full_ground = static_cast<Eigen::Index>(gate_index(sys, ground, kQubitR, 0));
  auto local = [&](Eigen::Index full) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (basis[static_cast<std::size_t>(i)] == full) return i;
    }
    throw NumericalError("weak-probe sector is not closed");
  };
  const Eigen::Index g0 = local(full_ground);

  CMatrix h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      h(i, j) = h_full(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
    }
    h(i, i) -= delta * excitations[static_cast<std::size_t>(i)];
  }
  const double beta = drive_fraction * p.kappa;
  const Eigen::Index photon = local(static_cast<Eigen::Index>(gate_index(sys, ground, kQubitR, 1)));
  CMatrix b = CMatrix::Zero(d, d);
  b(g0, photon) = 1.0;
  // i sqrt(kappa) (beta b^dagger - beta b)
  h += I * std::sqrt(p.kappa) * beta * (b.adjoint() - b);

  std::vector<CMatrix> ops;
  ops.push_back(std::sqrt(p.kappa) * b);
  for (int k = 0; k < n_atoms; ++k) {
    auto single = [&](int level) {
      std::vector<int> lv = ground;
      lv[static_cast<std::size_t>(k)] = level;
      return local(static_cast<Eigen::Index>(gate_index(sys, lv, kQubitR, 0)));
    };
    if (p.gamma_e > 0.0) {
      CMatrix l = CMatrix::Zero(d, d);
      l(g0, single(kGateE)) = std::sqrt(p.gamma_e);
      ops.push_back(std::move(l));
    }
    if (p.gamma_r > 0.0) {
      CMatrix l = CMatrix::Zero(d, d);
      l(g0, single(kGateR)) = std::sqrt(p.gamma_r);
      ops.push_back(std::move(l));
    }
    if (p.gamma_p > 0.0) {
      std::vector<int> lv = ground;
      lv[static_cast<std::size_t>(k)] = kGateP;
      CMatrix l = CMatrix::Zero(d, d);
      l(g0, local(static_cast<Eigen::Index>(gate_index(sys, lv, kQubitP, 0)))) =
          std::sqrt(p.gamma_p);
      ops.push_back(std::move(l));
    }
  }

  CMatrix liou = liouvillian(h, ops);
  const Eigen::Index d2 = d * d;
  CVector rhs = CVector::Zero(d2);
  liou.row(0).setZero();
  for (Eigen::Index i = 0; i < d; ++i) liou(0, i * d + i) = 1.0;
  rhs(0) = 1.0;
  const CVector vec_rho = liou.fullPivLu().solve(rhs);
  const Eigen::Map<const CMatrix> rho(vec_rho.data(), d, d);
  const cplx b_mean = (b * rho).trace();
  return 1.0 - std::sqrt(p.kappa) * b_mean / beta;
}

CVector to_dense(const FockLadderState& s, const FullSystemSpec& sys) {
  if (sys.n_atoms != 1 || sys.fock_cutoff != s.cutoff()) {
    throw InvalidInput("to_dense: needs one atom and matching cutoff");
  }
  CVector v = CVector::Zero(static_cast<Eigen::Index>(full_dimension(sys)));
  for (int n = 0; n <= s.cutoff(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    v(static_cast<Eigen::Index>(full_index(sys, {kG}, n))) = s.c_b[i];
    v(static_cast<Eigen::Index>(full_index(sys, {kE}, n))) = s.c_e[i];
    v(static_cast<Eigen::Index>(full_index(sys, {kR}, n))) = s.c_r[i];
  }
  return v;
}

}  // namespace rydcav
