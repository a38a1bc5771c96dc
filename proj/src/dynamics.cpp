#include "rydcav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rydcav/csv.hpp"
#include "rydcav/errors.hpp"
#include "rydcav/rk4.hpp"

namespace rydcav {

namespace {

constexpr cplx I{0.0, 1.0};

cplx elimination_denominator(const PhysicalParams& p) {
  if (p.delta_e == 0.0 && p.gamma_e == 0.0) {
    throw SingularElimination("adiabatic elimination needs delta_e != 0 or gamma_e > 0");
  }
  return {p.delta_e, 0.5 * p.gamma_e};
}

std::vector<double> column(const std::vector<SingleExcState>& states,
                           cplx SingleExcState::*member) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(std::norm(s.*member));
  return out;
}

}  // namespace

std::vector<double> Trajectory::pop_b() const { return column(states, &SingleExcState::c_b); }
std::vector<double> Trajectory::pop_e() const { return column(states, &SingleExcState::c_e); }
std::vector<double> Trajectory::pop_r() const { return column(states, &SingleExcState::c_r); }

SingleExcState eom_full(const SingleExcState& s, const PhysicalParams& p) {
  const double g = p.g_collective;
  const cplx omega = p.omega_rabi;
  SingleExcState d;
  d.c_b = g * s.c_e - 0.5 * p.kappa * s.c_b;
  d.c_e = -g * s.c_b + I * 0.5 * std::conj(omega) * s.c_r + I * p.delta_e * s.c_e -
          0.5 * p.gamma_e * s.c_e;
  d.c_r = I * 0.5 * omega * s.c_e + I * p.delta_r * s.c_r - 0.5 * p.gamma_r * s.c_r;
  return d;
}

AdiabaticState eom_adiabatic(const AdiabaticState& s, const PhysicalParams& p) {
  const cplx den = elimination_denominator(p);
  const double g = p.g_collective;
  const cplx omega = p.omega_rabi;
  AdiabaticState d;
  d.c_b = -I * (g * g / den) * s.c_b - (g * std::conj(omega) / (2.0 * den)) * s.c_r -
          0.5 * p.kappa * s.c_b;
  d.c_r = (g * omega / (2.0 * den)) * s.c_b - I * (std::norm(omega) / (4.0 * den)) * s.c_r +
          I * p.delta_r * s.c_r - 0.5 * p.gamma_r * s.c_r;
  return d;
}

cplx effective_coupling(const PhysicalParams& p) {
  const cplx den = elimination_denominator(p);
  return p.g_collective * std::conj(p.omega_rabi) / (2.0 * den);
}

cplx eliminated_excited_amplitude(const AdiabaticState& s, const PhysicalParams& p) {
  elimination_denominator(p);
  const cplx den{-0.5 * p.gamma_e, p.delta_e};  // i delta_e - gamma_e / 2
  return (p.g_collective * s.c_b - I * 0.5 * std::conj(p.omega_rabi) * s.c_r) / den;
}

bool adiabatic_regime_valid(const PhysicalParams& p) {
  return std::abs(p.delta_e) >= 5.0 * std::max(p.g_collective, std::abs(p.omega_rabi));
}

double max_stable_step(const PhysicalParams& p) {
  const double f_max =
      std::max({std::abs(p.delta_e), std::abs(p.omega_rabi), p.g_collective, p.kappa});
  if (f_max == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (50.0 * f_max);
}

double default_step(const PhysicalParams& p) {
  const double bound = max_stable_step(p);
  if (!std::isfinite(bound)) return 1e-3;
  double decade = std::pow(10.0, std::floor(std::log10(bound)));
  for (double mant : {5.0, 2.0, 1.0}) {
    if (mant * decade <= bound) return mant * decade;
  }
  return decade / 2.0;
}

Trajectory integrate(const SingleExcState& state0, const PhysicalParams& p,
                     const IntegrationOptions& options) {
  if (!(options.dt > 0.0)) throw InvalidInput("dt must be > 0");
  if (!(options.t_end >= 0.0)) throw InvalidInput("t_end must be >= 0");
  const double bound = max_stable_step(p);
  if (options.dt > bound) {
    throw StepSizeTooLarge("dt = " + format_double(options.dt) +
                               " us exceeds the RK4 bound 1/(50 f_max) = " +
                               format_double(bound) + " us",
                           bound);
  }

  const auto steps = static_cast<long long>(std::llround(options.t_end / options.dt));
  const long long stride =
      std::max<long long>(1, std::llround(options.sample_interval / options.dt));

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(steps / stride + 2));
  traj.states.reserve(traj.times.capacity());
  auto record = [&](long long k, const SingleExcState& s) {
    traj.times.push_back(static_cast<double>(k) * options.dt);
    traj.states.push_back(s);
  };

  if (options.model == DynamicsModel::full) {
    auto f = [&p](const SingleExcState& s) { return eom_full(s, p); };
    SingleExcState s = state0;
    record(0, s);
    for (long long k = 1; k <= steps; ++k) {
      s = rk4_step(s, options.dt, f);
      if (k % stride == 0 || k == steps) record(k, s);
    }
    return traj;
  }

  if (!adiabatic_regime_valid(p)) {
    traj.warnings.push_back(
        "adiabatic model outside its regime: |delta_e| < 5 max(g, |Omega|)");
  }
  auto f = [&p](const AdiabaticState& s) { return eom_adiabatic(s, p); };
  AdiabaticState s{state0.c_b, state0.c_r};
  auto full_state = [&p](const AdiabaticState& a) {
    return SingleExcState{a.c_b, eliminated_excited_amplitude(a, p), a.c_r};
  };
  // The initial condition is preserved verbatim, including its c_e.
  traj.times.push_back(0.0);
  traj.states.push_back(state0);
  for (long long k = 1; k <= steps; ++k) {
    s = rk4_step(s, options.dt, f);
    if (k % stride == 0 || k == steps) record(k, full_state(s));
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  CsvWriter csv(out);
  csv.header({"t_us", "pop_b", "pop_e", "pop_r", "re_cb", "im_cb", "re_ce", "im_ce", "re_cr",
              "im_cr"});
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const auto& s = trajectory.states[i];
    csv.field(trajectory.times[i])
        .field(std::norm(s.c_b))
        .field(std::norm(s.c_e))
        .field(std::norm(s.c_r))
        .field(s.c_b.real())
        .field(s.c_b.imag())
        .field(s.c_e.real())
        .field(s.c_e.imag())
        .field(s.c_r.real())
        .field(s.c_r.imag());
    csv.end_row();
  }
}

}  // namespace rydcav
