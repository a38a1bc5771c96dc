#include "rydcav/gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "rydcav/csv.hpp"
#include "rydcav/errors.hpp"
#include "rydcav/parallel.hpp"

namespace rydcav {

namespace {

constexpr cplx I{0.0, 1.0};

bool usable(cplx z) { return z != cplx(0.0, 0.0) && std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_elimination(const PhysicalParams& p, double delta) {
  if (p.delta_e + delta == 0.0 && p.gamma_e == 0.0) {
    throw SingularElimination("delta_e + delta = 0 with gamma_e = 0");
  }
}

cplx respond(const PhysicalParams& p, double delta, cplx bracket) {
  if (!usable(bracket)) {
    throw SingularResponse("reflection denominator vanishes at delta = " +
                               format_double(mhz_from_angular(delta)) + " MHz",
                           delta);
  }
  return 1.0 - p.kappa / bracket;
}

cplx divide(cplx num, cplx den, double delta) {
  if (!usable(den)) {
    throw SingularResponse("dressed-state denominator vanishes at delta = " +
                               format_double(mhz_from_angular(delta)) + " MHz",
                           delta);
  }
  return num / den;
}

double uniform_single_coupling(const PhysicalParams& p) {
  if (p.g_single) return *p.g_single;
  return p.g_collective / std::sqrt(static_cast<double>(p.n_atoms));
}

double blocked_fidelity(const PhysicalParams& p, std::span<const cplx> v_m, int sign) {
  return fidelity(reflection_unblocked(p, 0.0), reflection_blocked(p, 0.0, v_m, sign));
}

std::vector<double> linspace(double start, double stop, long long count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (long long i = 0; i < count; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

}  // namespace

GateGeometry build_geometry(std::array<int, 3> dims, double spacing_um,
                            double qubit_offset_sites) {
  for (int d : dims) {
    if (d < 1) throw InvalidInput("lattice dimensions must be >= 1");
  }
  if (!(spacing_um > 0.0)) throw InvalidInput("lattice spacing must be > 0");
  GateGeometry g;
  g.dims = dims;
  g.spacing = spacing_um;
  auto centered = [&](int i, int n) { return (i - 0.5 * (n - 1)) * spacing_um; };
  g.atom_positions.reserve(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        g.atom_positions.emplace_back(centered(i, dims[0]), centered(j, dims[1]),
                                      centered(k, dims[2]));
      }
    }
  }
  const double top = 0.5 * (dims[2] - 1) * spacing_um;
  g.qubit_position = Eigen::Vector3d(0.0, 0.0, top + qubit_offset_sites * spacing_um);
  return g;
}

double ForsterModel::factor(double theta) const {
  if (angular_table.empty()) return 1.0;
  if (theta <= angular_table.front().first) return angular_table.front().second;
  if (theta >= angular_table.back().first) return angular_table.back().second;
  auto hi = std::upper_bound(angular_table.begin(), angular_table.end(), theta,
                             [](double t, const auto& e) { return t < e.first; });
  auto lo = hi - 1;
  const double w = (theta - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

std::vector<cplx> forster_coupling(const GateGeometry& geom, const ForsterModel& model) {
  if (!(model.c3 > 0.0)) throw InvalidInput("c3 must be > 0");
  for (std::size_t i = 1; i < model.angular_table.size(); ++i) {
    if (!(model.angular_table[i].first > model.angular_table[i - 1].first)) {
      throw InvalidInput("angular factor table must be strictly increasing in angle");
    }
  }
  std::vector<cplx> v;
  v.reserve(geom.atom_positions.size());
  for (const auto& pos : geom.atom_positions) {
    const Eigen::Vector3d d = pos - geom.qubit_position;
    const double r = d.norm();
    if (r == 0.0) throw GeometryError("qubit atom coincides with a lattice site");
    const double theta = std::acos(std::clamp(d.z() / r, -1.0, 1.0));
    v.emplace_back(model.c3 * model.factor(theta) / (r * r * r), 0.0);
  }
  return v;
}

GateQuantities gate_quantities(const PhysicalParams& p, double delta,
                               std::span<const cplx> v_m, int blockade_sign) {
  check_elimination(p, delta);
  if (blockade_sign != 1 && blockade_sign != -1) {
    throw InvalidInput("blockade_sign must be +1 or -1");
  }
  const double g = p.g_collective;
  const double om2 = std::norm(p.omega_rabi);
  GateQuantities q;
  q.delta_ac = -g * g / cplx(p.delta_e + delta, 0.5 * p.gamma_e);
  const cplx e_den{-0.5 * p.gamma_e, p.delta_e + delta};  // i(delta_e + delta) - gamma_e/2
  q.eta = 0.25 * om2 / (e_den * e_den);
  q.delta_dr = -p.delta_r - I * 0.25 * om2 / cplx(0.5 * p.gamma_e, -(p.delta_e + delta));
  if (q.delta_ac.imag() < 0.0) {
    throw NumericalError("ac Stark shift has negative imaginary part");
  }
  q.b_m.reserve(v_m.size());
  const cplx p_den{0.5 * p.gamma_p, p.delta_p - delta};
  for (const cplx& v : v_m) {
    q.b_m.push_back(static_cast<double>(blockade_sign) * divide(std::norm(v), p_den, delta));
  }
  return q;
}

cplx reflection_blocked(const PhysicalParams& p, double delta, std::span<const cplx> v_m,
                        int blockade_sign, std::span<const cplx> g_m) {
  if (v_m.size() != static_cast<std::size_t>(p.n_atoms)) {
    throw InvalidInput("need one Forster coupling per ensemble atom (" +
                       std::to_string(p.n_atoms) + "), got " + std::to_string(v_m.size()));
  }
  if (!g_m.empty() && g_m.size() != v_m.size()) {
    throw InvalidInput("per-atom coupling list does not match the number of atoms");
  }
  const GateQuantities q = gate_quantities(p, delta, v_m, blockade_sign);
  const double g0_sq = std::pow(uniform_single_coupling(p), 2);
  const cplx base{0.5 * p.gamma_r, -delta};
  cplx sum{0.0, 0.0};
  for (std::size_t m = 0; m < v_m.size(); ++m) {
    const double gm_sq = g_m.empty() ? g0_sq : std::norm(g_m[m]);
    sum += divide(gm_sq, base + I * q.delta_dr + q.b_m[m], delta);
  }
  return respond(p, delta, 0.5 * p.kappa - I * delta - I * q.delta_ac - q.eta * sum);
}

cplx reflection_unblocked(const PhysicalParams& p, double delta) {
  const GateQuantities q = gate_quantities(p, delta, {});
  const double g = p.g_collective;
  const cplx den = cplx(0.5 * p.gamma_r, -delta) + I * q.delta_dr;
  const cplx term = g == 0.0 ? cplx(0.0, 0.0) : q.eta * divide(g * g, den, delta);
  return respond(p, delta, 0.5 * p.kappa - I * delta - I * q.delta_ac - term);
}

double fidelity(cplx r_unblocked, cplx r_blocked) {
  return std::norm(2.0 + r_unblocked - r_blocked) / 16.0;
}

PhysicalParams auto_two_photon_resonance(const PhysicalParams& p) {
  PhysicalParams out = p;
  const double om2 = std::norm(p.omega_rabi);
  if (om2 == 0.0) {
    out.delta_r = 0.0;
    return out;
  }
  check_elimination(p, 0.0);
  out.delta_r = -(I * 0.25 * om2 / cplx(0.5 * p.gamma_e, -p.delta_e)).real();
  return out;
}

ResonanceSearch refine_two_photon_resonance(const PhysicalParams& p, std::span<const cplx> v_m,
                                            int blockade_sign) {
  ResonanceSearch res;
  res.params = auto_two_photon_resonance(p);
  res.analytic_delta_r = res.params.delta_r;
  res.fidelity_analytic = blocked_fidelity(res.params, v_m, blockade_sign);
  res.fidelity = res.fidelity_analytic;

  // The dressed resonance has width of order |eta| g^2 / kappa.
  const cplx eta = gate_quantities(p, 0.0, {}).eta;
  const double g2 = p.g_collective * p.g_collective;
  const double half_width =
      20.0 * std::max({p.kappa, p.gamma_r, std::abs(eta) * g2 / std::max(p.kappa, 1e-300)});

  auto f_at = [&](double dr) {
    PhysicalParams q = res.params;
    q.delta_r = dr;
    try {
      return blocked_fidelity(q, v_m, blockade_sign);
    } catch (const NumericalError&) {
      return -1.0;
    }
  };

  constexpr int kGrid = 400;
  const double lo = res.analytic_delta_r - half_width;
  const double step = 2.0 * half_width / kGrid;
  int best = 0;
  double best_f = -2.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double f = f_at(lo + step * i);
    if (f > best_f) {
      best_f = f;
      best = i;
    }
  }
  if (best == 0 || best == kGrid) {
    res.bracket_failed = true;
    return res;
  }
  const auto [x, neg_f] = boost::math::tools::brent_find_minima(
      [&](double dr) { return -f_at(dr); }, lo + step * (best - 1), lo + step * (best + 1),
      std::numeric_limits<double>::digits / 2);
  if (-neg_f > res.fidelity_analytic) {
    res.params.delta_r = x;
    res.fidelity = -neg_f;
  }
  return res;
}

GatePoint evaluate_gate(PhysicalParams p, std::span<const cplx> v_m, const GateOptions& options) {
  GatePoint pt;
  try {
    if (options.refine_resonance) {
      const ResonanceSearch rs = refine_two_photon_resonance(p, v_m, options.blockade_sign);
      p = rs.params;
      if (rs.bracket_failed) pt.status = "bracket_failed";
    } else if (options.auto_resonance) {
      p = auto_two_photon_resonance(p);
    }
    pt.params = p;
    pt.r_unblocked = reflection_unblocked(p, options.delta);
    pt.r_blocked = reflection_blocked(p, options.delta, v_m, options.blockade_sign);
    pt.fidelity = fidelity(pt.r_unblocked, pt.r_blocked);
  } catch (const SingularElimination&) {
    pt.params = p;
    pt.status = "singular_elimination";
    pt.r_unblocked = pt.r_blocked = cplx(std::nan(""), std::nan(""));
    pt.fidelity = std::nan("");
  } catch (const SingularResponse&) {
    pt.params = p;
    pt.status = "singular";
    pt.r_unblocked = pt.r_blocked = cplx(std::nan(""), std::nan(""));
    pt.fidelity = std::nan("");
  }
  return pt;
}

ScanAxis parse_scan_axis(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string name, start, stop, count;
  if (!(in >> name >> start >> stop >> count)) {
    throw ConfigError("scan axis must read '<key> <start> <stop> <count>': " + std::string(text));
  }
  std::string extra;
  if (in >> extra) throw ConfigError("trailing text in scan axis: " + std::string(text));
  const double n = parse_double(count);
  if (!(n >= 1.0) || n != std::floor(n) || n > 1e7) {
    throw ConfigError("scan axis count must be a positive integer: " + count);
  }
  return {name, linspace(parse_double(start), parse_double(stop), static_cast<long long>(n))};
}

ScanTable scan(const Config& base, const std::vector<ScanAxis>& axes,
               std::span<const cplx> v_m, const GateOptions& options, unsigned workers) {
  ScanTable table;
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigError("scan axis '" + a.key + "' has no values");
    table.axis_names.push_back(a.key);
    total *= a.values.size();
  }

  // Every grid point is resolved before any evaluation.
  std::vector<PhysicalParams> params(total);
  std::vector<GateOptions> point_options(total, options);
  table.axis_values.resize(total);
  for (std::size_t row = 0; row < total; ++row) {
    Config c = base;
    std::size_t rest = row;
    std::vector<double> coords(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      coords[k] = axes[k].values[rest % axes[k].values.size()];
      rest /= axes[k].values.size();
    }
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (axes[k].key == "probe_delta") {
        point_options[row].delta = angular_from_mhz(coords[k]);
      } else {
        c.set(axes[k].key, coords[k]);
      }
    }
    params[row] = params_from_config(c);
    table.axis_values[row] = std::move(coords);
  }

  table.points.resize(total);
  parallel_for(total, workers, [&](std::size_t row) {
    table.points[row] = evaluate_gate(params[row], v_m, point_options[row]);
  });
  return table;
}

void write_scan_csv(std::ostream& out, const ScanTable& table) {
  CsvWriter csv(out);
  std::vector<std::string> header = table.axis_names;
  for (const char* h : {"re_R_unblocked", "im_R_unblocked", "re_R_blocked", "im_R_blocked", "F_z",
                        "status"}) {
    header.emplace_back(h);
  }
  csv.header(header);
  for (std::size_t row = 0; row < table.points.size(); ++row) {
    for (double v : table.axis_values[row]) csv.field(v);
    const GatePoint& pt = table.points[row];
    csv.field(pt.r_unblocked.real())
        .field(pt.r_unblocked.imag())
        .field(pt.r_blocked.real())
        .field(pt.r_blocked.imag())
        .field(pt.fidelity)
        .field(std::string_view(pt.status));
    csv.end_row();
  }
}

void write_geometry_csv(std::ostream& out, const GateGeometry& geom, std::span<const cplx> v_m) {
  if (v_m.size() != geom.atom_positions.size()) {
    throw InvalidInput("geometry dump needs one coupling per site");
  }
  CsvWriter csv(out);
  csv.header({"x_um", "y_um", "z_um", "distance_um", "abs_v_mhz"});
  for (std::size_t i = 0; i < v_m.size(); ++i) {
    const auto& pos = geom.atom_positions[i];
    csv.field(pos.x())
        .field(pos.y())
        .field(pos.z())
        .field((pos - geom.qubit_position).norm())
        .field(mhz_from_angular(std::abs(v_m[i])));
    csv.end_row();
  }
}

}  // namespace rydcav
