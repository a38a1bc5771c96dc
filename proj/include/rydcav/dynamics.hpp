#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rydcav/params.hpp"
#include "rydcav/states.hpp"

namespace rydcav {

enum class DynamicsModel { full, adiabatic };

// Time series of single-excitation amplitudes. For the adiabatic model the
// stored c_e is the slaved intermediate amplitude.
struct Trajectory {
  std::vector<double> times;  // us
  std::vector<SingleExcState> states;
  std::vector<std::string> warnings;

  std::vector<double> pop_b() const;
  std::vector<double> pop_e() const;
  std::vector<double> pop_r() const;
};

// Right-hand side of the single-excitation equations of motion with cavity
// decay kappa and spontaneous decays gamma_e, gamma_r.
SingleExcState eom_full(const SingleExcState& s, const PhysicalParams& p);

// Right-hand side after eliminating |e>: ac Stark shifts of both levels,
// the effective Raman coupling, kappa/2 on c_b and gamma_r/2 on c_r.
// Throws SingularElimination when delta_e = gamma_e = 0.
AdiabaticState eom_adiabatic(const AdiabaticState& s, const PhysicalParams& p);

// g * conj(Omega) / (2 (delta_e + i gamma_e / 2)).
cplx effective_coupling(const PhysicalParams& p);

// Intermediate amplitude slaved to (c_b, c_r) in the adiabatic limit.
cplx eliminated_excited_amplitude(const AdiabaticState& s, const PhysicalParams& p);

// |delta_e| >= 5 max(g, |Omega|); below this the elimination is suspect.
bool adiabatic_regime_valid(const PhysicalParams& p);

// Largest accepted RK4 step: 1 / (50 f_max), f_max the largest of
// |delta_e|, |Omega|, g, kappa in rad/us.
double max_stable_step(const PhysicalParams& p);

// Largest value from the 1-2-5 ladder not exceeding max_stable_step.
double default_step(const PhysicalParams& p);

struct IntegrationOptions {
  double t_end = 10.0;          // us
  double dt = 1e-5;             // us
  DynamicsModel model = DynamicsModel::full;
  double sample_interval = 0.01;  // us; rounded to a whole number of steps
};

// Fixed-step RK4 integration. Throws StepSizeTooLarge when dt exceeds
// max_stable_step(p).
Trajectory integrate(const SingleExcState& state0, const PhysicalParams& p,
                     const IntegrationOptions& options);

// Header: t_us,pop_b,pop_e,pop_r,re_cb,im_cb,re_ce,im_ce,re_cr,im_cr
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace rydcav
