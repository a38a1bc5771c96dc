#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "rydcav/config.hpp"

namespace rydcav {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Unit convention: configuration files carry ordinary frequencies in MHz,
// everything internal is angular frequency in rad/us with time in us.
constexpr double angular_from_mhz(double mhz) { return two_pi * mhz; }
constexpr double mhz_from_angular(double rad_per_us) { return rad_per_us / two_pi; }

// Rates, detunings and couplings of the blocked-ensemble cavity system.
// All frequencies are angular (rad/us).
struct PhysicalParams {
  cplx omega_rabi{0.0, 0.0};     // control-laser Rabi frequency
  double g_collective = 0.0;     // collective ensemble-photon coupling
  std::optional<double> g_single;  // per-atom coupling, uniform ensembles only
  double delta_e = 0.0;          // one-photon detuning
  double delta_r = 0.0;          // two-photon detuning
  double gamma_e = 0.0;
  double gamma_r = 0.0;
  double gamma_p = 0.0;
  double kappa = 0.0;            // cavity field decay
  double delta_p = 0.0;          // Forster pair-state penalty
  int n_atoms = 1;

  // Throws InvalidInput on negative rates, n_atoms < 1 or an inconsistent
  // (g_single, g_collective, n_atoms) triple.
  void validate() const;

  bool operator==(const PhysicalParams&) const = default;
};

/// Collective coupling sqrt(sum |g_n|^2). Throws InvalidInput on an empty list.
double collective_coupling(std::span<const cplx> g_list);

// Keys (MHz unless noted): omega, omega_phase (rad), g, g_single,
// n_atoms, delta_e, delta_r, gamma_e, gamma_r, gamma_p, kappa, delta_p.
// omega, delta_e, kappa and one of g / g_single are required.
PhysicalParams params_from_config(const Config& config);

// Inverse of params_from_config; emits every field at full precision.
std::string params_to_config(const PhysicalParams& p);

// Writes the physics keys of `p` into an existing config (MHz units).
void store_params(const PhysicalParams& p, Config& config);

}  // namespace rydcav
