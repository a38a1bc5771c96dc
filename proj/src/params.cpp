#include "rydcav/params.hpp"

#include <cmath>

#include "rydcav/errors.hpp"

namespace rydcav {

namespace {

constexpr double kCouplingRelTol = 1e-9;

void require_nonnegative(double value, const char* name) {
  if (!(value >= 0.0)) {
    throw InvalidInput(std::string("rate '") + name + "' must be >= 0, got " +
                       format_double(mhz_from_angular(value)) + " MHz");
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require_nonnegative(gamma_e, "gamma_e");
  require_nonnegative(gamma_r, "gamma_r");
  require_nonnegative(gamma_p, "gamma_p");
  require_nonnegative(kappa, "kappa");
  require_nonnegative(g_collective, "g");
  if (n_atoms < 1) throw InvalidInput("n_atoms must be >= 1");
  if (g_single) {
    require_nonnegative(*g_single, "g_single");
    const double expected = *g_single * std::sqrt(static_cast<double>(n_atoms));
    const double scale = std::max({std::abs(expected), std::abs(g_collective), 1e-300});
    if (std::abs(expected - g_collective) > kCouplingRelTol * scale) {
      throw InvalidInput("inconsistent couplings: g = " +
                         format_double(mhz_from_angular(g_collective)) +
                         " MHz but g_single*sqrt(n_atoms) = " +
                         format_double(mhz_from_angular(expected)) + " MHz");
    }
  }
}

double collective_coupling(std::span<const cplx> g_list) {
  if (g_list.empty()) throw InvalidInput("collective_coupling: empty coupling list");
  double scale = 0.0;
  for (const cplx& g : g_list) scale = std::max(scale, std::abs(g));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const cplx& g : g_list) sum += std::norm(g / scale);
  return scale * std::sqrt(sum);
}

PhysicalParams params_from_config(const Config& config) {
  PhysicalParams p;
  const double omega_mag = angular_from_mhz(config.get_double("omega"));
  const double omega_phase = config.get_double("omega_phase", 0.0);
  p.omega_rabi = std::polar(omega_mag, omega_phase);
  if (omega_phase == 0.0) p.omega_rabi = cplx(omega_mag, 0.0);

  p.delta_e = angular_from_mhz(config.get_double("delta_e"));
  p.kappa = angular_from_mhz(config.get_double("kappa"));
  p.delta_r = angular_from_mhz(config.get_double("delta_r", 0.0));
  p.gamma_e = angular_from_mhz(config.get_double("gamma_e", 0.0));
  p.gamma_r = angular_from_mhz(config.get_double("gamma_r", 0.0));
  p.gamma_p = angular_from_mhz(config.get_double("gamma_p", 0.0));
  p.delta_p = angular_from_mhz(config.get_double("delta_p", 0.0));

  const long long n = config.get_int("n_atoms", 1);
  if (n < 1 || n > 1'000'000'000) throw ConfigError("n_atoms out of range");
  p.n_atoms = static_cast<int>(n);

  const bool has_g = config.has("g");
  const bool has_single = config.has("g_single");
  if (!has_g && !has_single) {
    throw ConfigError(config.source() + ": one of 'g' or 'g_single' is required");
  }
  if (has_single) {
    p.g_single = angular_from_mhz(config.get_double("g_single"));
    p.g_collective = *p.g_single * std::sqrt(static_cast<double>(p.n_atoms));
  }
  if (has_g) p.g_collective = angular_from_mhz(config.get_double("g"));

  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(config.source() + ": " + e.what());
  }
  return p;
}

void store_params(const PhysicalParams& p, Config& config) {
  config.set("omega", mhz_from_angular(std::abs(p.omega_rabi)));
  if (p.omega_rabi.imag() != 0.0 || p.omega_rabi.real() < 0.0) {
    config.set("omega_phase", std::arg(p.omega_rabi));
  }
  config.set("g", mhz_from_angular(p.g_collective));
  if (p.g_single) config.set("g_single", mhz_from_angular(*p.g_single));
  config.set("n_atoms", std::to_string(p.n_atoms));
  config.set("delta_e", mhz_from_angular(p.delta_e));
  config.set("delta_r", mhz_from_angular(p.delta_r));
  config.set("gamma_e", mhz_from_angular(p.gamma_e));
  config.set("gamma_r", mhz_from_angular(p.gamma_r));
  config.set("gamma_p", mhz_from_angular(p.gamma_p));
  config.set("kappa", mhz_from_angular(p.kappa));
  config.set("delta_p", mhz_from_angular(p.delta_p));
}

std::string params_to_config(const PhysicalParams& p) {
  Config cfg;
  store_params(p, cfg);
  return cfg.to_text();
}

}  // namespace rydcav
