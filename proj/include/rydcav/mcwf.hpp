#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rydcav/params.hpp"
#include "rydcav/states.hpp"

namespace rydcav {

enum class JumpKind { GammaE, GammaR, Kappa };

std::string to_string(JumpKind kind);

struct JumpEvent {
  double time;  // us, end of the step in which the jump was sampled
  JumpKind kind;
};

struct JumpProbabilities {
  double p_e = 0.0;
  double p_r = 0.0;
  double p_kappa = 0.0;
  double total() const { return p_e + p_r + p_kappa; }
};

// Upper limit on the summed jump probability of a single step.
inline constexpr double kMaxJumpProbability = 0.1;

// Coherent state |alpha> on the photon ladder with all atoms in |g>,
// truncated at `cutoff` and renormalized. Throws CutoffTooSmall when the
// discarded Poisson tail exceeds `tail_tolerance`.
FockLadderState coherent_ladder(cplx alpha, int cutoff, double tail_tolerance = 1e-6);

// Poisson weight of photon numbers above `cutoff` for |alpha>.
double coherent_tail_mass(cplx alpha, int cutoff);

// Hamiltonian part of the Fock-ladder equations of motion. Each closed
// loop (c_b[n], c_e[n-1], c_r[n-1]) couples through sqrt(n) g; c_b[0] is
// stationary and c_e[cutoff], c_r[cutoff] only feel Omega and detunings.
FockLadderState eom_fock(const FockLadderState& s, const PhysicalParams& p);

// Per-step detection probabilities. Throws StepTooLarge when their sum
// reaches kMaxJumpProbability.
JumpProbabilities jump_probabilities(const FockLadderState& s, const PhysicalParams& p,
                                     double dt);

// Conditional state after a detection, renormalized:
//   GammaE: c_b <- c_e, all else discarded (atom back in |g>, field kept);
//   GammaR: c_b <- c_r, likewise;
//   Kappa:  c_x[n] <- sqrt(n+1) c_x[n+1] for every internal state x.
// Throws ImpossibleJump when the projected state has zero norm.
FockLadderState apply_jump(const FockLadderState& s, JumpKind kind);

// One RK4 step of eom_fock, precomputed as the degree-4 Taylor
// polynomial of each 3x3 loop generator. Identical in exact arithmetic to
// rk4_step(eom_fock) and a few times cheaper.
class FockPropagator {
 public:
  FockPropagator(const PhysicalParams& p, int cutoff, double dt);

  void step(FockLadderState& s) const;
  int cutoff() const { return cutoff_; }

 private:
  int cutoff_;
  std::vector<Eigen::Matrix3cd> loops_;  // loop n-1 acts on (b[n], e[n-1], r[n-1])
  Eigen::Matrix2cd top_;                 // acts on (e[cutoff], r[cutoff])
};

struct McwfOptions {
  double t_end = 1.0;             // us
  double dt = 1e-3;               // us
  double sample_interval = 0.01;  // us; rounded to a whole number of steps
};

struct McwfTrajectory {
  std::vector<double> times;
  std::vector<double> mean_photon;
  std::vector<double> rydberg_pop;
  std::vector<JumpEvent> jumps;
  FockLadderState final_state;
};

// First-order quantum-jump trajectory. Every step draws one uniform number
// u from the seeded stream, using jump probabilities of the pre-step state:
// u below p_e, p_e + p_r or the total selects a GammaE, GammaR or Kappa
// jump; otherwise the state takes one Hamiltonian RK4 step followed by the
// no-jump damping factors. The state is renormalized after every step.
McwfTrajectory run_trajectory(const FockLadderState& state0, const PhysicalParams& p,
                              const McwfOptions& options, std::uint64_t seed);

struct EnsembleOptions {
  McwfOptions trajectory;
  std::size_t n_traj = 1;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> mean_photon;
  std::vector<double> stderr_photon;
  std::vector<double> rydberg_pop;
  std::vector<double> stderr_rydberg;
  std::size_t n_traj = 0;
  std::uint64_t master_seed = 0;
  std::array<std::uint64_t, 3> jump_counts{};  // indexed by JumpKind
};

// Trajectory i runs with seed trajectory_seed(master_seed, i). Statistics
// are accumulated per fixed block of trajectories and the blocks merged in
// index order, so the result is bit-identical for any worker count.
EnsembleResult ensemble_average(const FockLadderState& state0, const PhysicalParams& p,
                                const EnsembleOptions& options);

// Header: t_us,mean_photon,stderr_photon,rydberg_pop,stderr_rydberg
void write_ensemble_csv(std::ostream& out, const EnsembleResult& result);

}  // namespace rydcav
