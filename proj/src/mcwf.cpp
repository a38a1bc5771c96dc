#include "rydcav/mcwf.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rydcav/csv.hpp"
#include "rydcav/errors.hpp"
#include "rydcav/parallel.hpp"
#include "rydcav/rng.hpp"

namespace rydcav {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr std::size_t kBlockSize = 16;
constexpr double kNormTolerance = 1e-12;

template <class Matrix>
Matrix taylor4(const Matrix& a) {
  const Matrix a2 = a * a;
  const Matrix a3 = a2 * a;
  const Matrix a4 = a3 * a;
  return Matrix::Identity() + a + a2 / 2.0 + a3 / 6.0 + a4 / 24.0;
}

// Running mean and sum of squared deviations (Welford / Chan et al.).
struct Moments {
  double count = 0.0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit Moments(std::size_t samples) : mean(samples, 0.0), m2(samples, 0.0) {}

  void add(const std::vector<double>& x) {
    count += 1.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (x[i] - mean[i]);
    }
  }

  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double total = count + o.count;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double delta = o.mean[i] - mean[i];
      mean[i] += delta * (o.count / total);
      m2[i] += o.m2[i] + delta * delta * (count * o.count / total);
    }
    count = total;
  }

  std::vector<double> standard_error() const {
    std::vector<double> out(mean.size(), 0.0);
    if (count < 2.0) return out;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      out[i] = std::sqrt(std::max(0.0, m2[i]) / (count - 1.0) / count);
    }
    return out;
  }
};

struct BlockResult {
  Moments photon;
  Moments rydberg;
  std::array<std::uint64_t, 3> jumps{};

  explicit BlockResult(std::size_t samples) : photon(samples), rydberg(samples) {}
};

void check_options(const McwfOptions& o) {
  if (!(o.dt > 0.0)) throw InvalidInput("dt must be > 0");
  if (!(o.t_end >= 0.0)) throw InvalidInput("t_end must be >= 0");
  if (!(o.sample_interval > 0.0)) throw InvalidInput("sample_interval must be > 0");
}

}  // namespace

std::string to_string(JumpKind kind) {
  switch (kind) {
    case JumpKind::GammaE:
      return "GammaE";
    case JumpKind::GammaR:
      return "GammaR";
    case JumpKind::Kappa:
      return "Kappa";
  }
  return "?";
}

double coherent_tail_mass(cplx alpha, int cutoff) {
  const double mean = std::norm(alpha);
  if (mean == 0.0) return 0.0;
  // Poisson weights in log space to stay finite for large photon numbers.
  const double log_mean = std::log(mean);
  double tail = 0.0;
  const int n_max = cutoff + 50 + static_cast<int>(mean + 20.0 * std::sqrt(mean));
  for (int n = cutoff + 1; n <= n_max; ++n) {
    const double log_w = -mean + n * log_mean - std::lgamma(n + 1.0);
    tail += std::exp(log_w);
  }
  return tail;
}

FockLadderState coherent_ladder(cplx alpha, int cutoff, double tail_tolerance) {
  if (cutoff < 1) throw InvalidInput("coherent_ladder: cutoff must be >= 1");
  const double tail = coherent_tail_mass(alpha, cutoff);
  if (tail > tail_tolerance) {
    throw CutoffTooSmall("Fock cutoff " + std::to_string(cutoff) + " drops tail mass " +
                             format_double(tail) + " > tolerance " +
                             format_double(tail_tolerance),
                         tail);
  }
  FockLadderState s(cutoff);
  const double mean = std::norm(alpha);
  cplx c = std::exp(-0.5 * mean);
  s.c_b[0] = c;
  for (int n = 1; n <= cutoff; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    s.c_b[static_cast<std::size_t>(n)] = c;
  }
  s.renormalize();
  return s;
}

FockLadderState eom_fock(const FockLadderState& s, const PhysicalParams& p) {
  const std::size_t top = static_cast<std::size_t>(s.cutoff());
  const cplx half_omega = 0.5 * p.omega_rabi;
  const cplx half_omega_c = std::conj(half_omega);
  FockLadderState d(s.cutoff());
  for (std::size_t n = 1; n <= top; ++n) {
    const double gn = std::sqrt(static_cast<double>(n)) * p.g_collective;
    const std::size_t m = n - 1;
    d.c_b[n] = gn * s.c_e[m];
    d.c_e[m] = -gn * s.c_b[n] + I * half_omega_c * s.c_r[m] + I * p.delta_e * s.c_e[m];
    d.c_r[m] = I * half_omega * s.c_e[m] + I * p.delta_r * s.c_r[m];
  }
  d.c_e[top] = I * half_omega_c * s.c_r[top] + I * p.delta_e * s.c_e[top];
  d.c_r[top] = I * half_omega * s.c_e[top] + I * p.delta_r * s.c_r[top];
  return d;
}

JumpProbabilities jump_probabilities(const FockLadderState& s, const PhysicalParams& p,
                                     double dt) {
  JumpProbabilities jp;
  jp.p_e = p.gamma_e * dt * s.excited_population();
  jp.p_r = p.gamma_r * dt * s.rydberg_population();
  jp.p_kappa = p.kappa * dt * s.mean_photon();
  if (jp.total() >= kMaxJumpProbability) {
    const double suggested = dt * 0.5 * kMaxJumpProbability / jp.total();
    throw StepTooLarge("jump probability per step " + format_double(jp.total()) +
                           " >= " + format_double(kMaxJumpProbability) + " at dt = " +
                           format_double(dt) + " us; try dt <= " + format_double(suggested),
                       suggested);
  }
  return jp;
}

FockLadderState apply_jump(const FockLadderState& s, JumpKind kind) {
  FockLadderState out(s.cutoff());
  switch (kind) {
    case JumpKind::GammaE:
      out.c_b = s.c_e;
      break;
    case JumpKind::GammaR:
      out.c_b = s.c_r;
      break;
    case JumpKind::Kappa:
      for (std::size_t n = 0; n + 1 < s.size(); ++n) {
        const double a = std::sqrt(static_cast<double>(n + 1));
        out.c_b[n] = a * s.c_b[n + 1];
        out.c_e[n] = a * s.c_e[n + 1];
        out.c_r[n] = a * s.c_r[n + 1];
      }
      break;
  }
  if (out.renormalize() == 0.0) {
    throw ImpossibleJump(to_string(kind) + " jump on a state with no amplitude to project");
  }
  return out;
}

FockPropagator::FockPropagator(const PhysicalParams& p, int cutoff, double dt)
    : cutoff_(cutoff) {
  if (cutoff < 1) throw InvalidInput("FockPropagator: cutoff must be >= 1");
  const cplx half_omega = 0.5 * p.omega_rabi;
  loops_.reserve(static_cast<std::size_t>(cutoff));
  for (int n = 1; n <= cutoff; ++n) {
    const double gn = std::sqrt(static_cast<double>(n)) * p.g_collective;
    Eigen::Matrix3cd a;
    a << 0.0, gn, 0.0,
        -gn, I * p.delta_e, I * std::conj(half_omega),
        0.0, I * half_omega, I * p.delta_r;
    loops_.push_back(taylor4<Eigen::Matrix3cd>(dt * a));
  }
  Eigen::Matrix2cd a;
  a << I * p.delta_e, I * std::conj(half_omega),
      I * half_omega, I * p.delta_r;
  top_ = taylor4<Eigen::Matrix2cd>(dt * a);
}

void FockPropagator::step(FockLadderState& s) const {
  if (s.cutoff() != cutoff_) throw InvalidInput("FockPropagator: cutoff mismatch");
  for (std::size_t n = 1; n <= static_cast<std::size_t>(cutoff_); ++n) {
    const auto& m = loops_[n - 1];
    const cplx b = s.c_b[n], e = s.c_e[n - 1], r = s.c_r[n - 1];
    s.c_b[n] = m(0, 0) * b + m(0, 1) * e + m(0, 2) * r;
    s.c_e[n - 1] = m(1, 0) * b + m(1, 1) * e + m(1, 2) * r;
    s.c_r[n - 1] = m(2, 0) * b + m(2, 1) * e + m(2, 2) * r;
  }
  const std::size_t t = static_cast<std::size_t>(cutoff_);
  const cplx e = s.c_e[t], r = s.c_r[t];
  s.c_e[t] = top_(0, 0) * e + top_(0, 1) * r;
  s.c_r[t] = top_(1, 0) * e + top_(1, 1) * r;
}

McwfTrajectory run_trajectory(const FockLadderState& state0, const PhysicalParams& p,
                              const McwfOptions& options, std::uint64_t seed) {
  check_options(options);
  const FockPropagator propagator(p, state0.cutoff(), options.dt);
  const auto steps = std::llround(options.t_end / options.dt);
  const long long stride =
      std::max<long long>(1, std::llround(options.sample_interval / options.dt));

  const double dt = options.dt;
  const double damp_e = 1.0 - 0.5 * p.gamma_e * dt;
  const double damp_r = 1.0 - 0.5 * p.gamma_r * dt;
  std::vector<double> damp_k(state0.size());
  for (std::size_t n = 0; n < damp_k.size(); ++n) {
    damp_k[n] = 1.0 - 0.5 * p.kappa * static_cast<double>(n) * dt;
  }

  McwfTrajectory traj;
  const auto samples = static_cast<std::size_t>(steps / stride + 2);
  traj.times.reserve(samples);
  traj.mean_photon.reserve(samples);
  traj.rydberg_pop.reserve(samples);

  FockLadderState s = state0;
  if (s.renormalize() == 0.0) throw InvalidInput("run_trajectory: zero initial state");
  auto record = [&](long long k) {
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.mean_photon.push_back(s.mean_photon());
    traj.rydberg_pop.push_back(s.rydberg_population());
  };
  record(0);

  UniformStream rng(seed);
  for (long long k = 1; k <= steps; ++k) {
    const JumpProbabilities jp = jump_probabilities(s, p, dt);
    const double u = rng.next();
    if (u < jp.total()) {
      const JumpKind kind = u < jp.p_e                ? JumpKind::GammaE
                            : u < jp.p_e + jp.p_r     ? JumpKind::GammaR
                                                      : JumpKind::Kappa;
      s = apply_jump(s, kind);
      traj.jumps.push_back({static_cast<double>(k) * dt, kind});
    } else {
      propagator.step(s);
      for (std::size_t n = 0; n < s.size(); ++n) {
        s.c_b[n] *= damp_k[n];
        s.c_e[n] *= damp_e * damp_k[n];
        s.c_r[n] *= damp_r * damp_k[n];
      }
      s.renormalize();
    }
    if (std::abs(s.norm_sq() - 1.0) > kNormTolerance) {
      throw NumericalError("MCWF state lost normalization at t = " +
                           format_double(static_cast<double>(k) * dt) + " us");
    }
    if (k % stride == 0 || k == steps) record(k);
  }
  traj.final_state = std::move(s);
  return traj;
}

EnsembleResult ensemble_average(const FockLadderState& state0, const PhysicalParams& p,
                                const EnsembleOptions& options) {
  check_options(options.trajectory);
  if (options.n_traj < 1) throw InvalidInput("n_traj must be >= 1");

  // A throwaway run fixes the sample grid (and surfaces option errors early).
  McwfOptions probe = options.trajectory;
  const auto first = run_trajectory(state0, p, probe, trajectory_seed(options.master_seed, 0));
  const std::size_t samples = first.times.size();

  const std::size_t n_blocks = (options.n_traj + kBlockSize - 1) / kBlockSize;
  std::vector<BlockResult> blocks(n_blocks, BlockResult(samples));

  parallel_for(n_blocks, options.workers, [&](std::size_t b) {
    BlockResult& block = blocks[b];
    const std::size_t begin = b * kBlockSize;
    const std::size_t end = std::min(options.n_traj, begin + kBlockSize);
    for (std::size_t i = begin; i < end; ++i) {
      const McwfTrajectory t =
          i == 0 ? first
                 : run_trajectory(state0, p, options.trajectory,
                                  trajectory_seed(options.master_seed, i));
      block.photon.add(t.mean_photon);
      block.rydberg.add(t.rydberg_pop);
      for (const auto& j : t.jumps) ++block.jumps[static_cast<std::size_t>(j.kind)];
    }
  });

  Moments photon(samples), rydberg(samples);
  EnsembleResult result;
  for (const auto& block : blocks) {
    photon.merge(block.photon);
    rydberg.merge(block.rydberg);
    for (std::size_t k = 0; k < 3; ++k) result.jump_counts[k] += block.jumps[k];
  }
  result.times = first.times;
  result.mean_photon = photon.mean;
  result.stderr_photon = photon.standard_error();
  result.rydberg_pop = rydberg.mean;
  result.stderr_rydberg = rydberg.standard_error();
  result.n_traj = options.n_traj;
  result.master_seed = options.master_seed;
  return result;
}

void write_ensemble_csv(std::ostream& out, const EnsembleResult& result) {
  CsvWriter csv(out);
  csv.header({"t_us", "mean_photon", "stderr_photon", "rydberg_pop", "stderr_rydberg"});
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    csv.field(result.times[i])
        .field(result.mean_photon[i])
        .field(result.stderr_photon[i])
        .field(result.rydberg_pop[i])
        .field(result.stderr_rydberg[i]);
    csv.end_row();
  }
}

}  // namespace rydcav
