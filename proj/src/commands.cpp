#include "rydcav/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "rydcav/config.hpp"
#include "rydcav/dynamics.hpp"
#include "rydcav/errors.hpp"
#include "rydcav/gate.hpp"
#include "rydcav/mcwf.hpp"
#include "rydcav/oracle_suite.hpp"
#include "rydcav/params.hpp"

namespace rydcav {

namespace {

const std::set<std::string, std::less<>> kPhysicsKeys = {
    "omega",   "omega_phase", "g",       "g_single", "n_atoms", "delta_e",
    "delta_r", "gamma_e",     "gamma_r", "gamma_p",  "kappa",   "delta_p"};

void check_keys(const Config& c, std::initializer_list<const char*> extra, bool physics) {
  std::set<std::string, std::less<>> allowed(extra.begin(), extra.end());
  if (physics) allowed.insert(kPhysicsKeys.begin(), kPhysicsKeys.end());
  for (const auto& [key, value] : c.entries()) {
    if (allowed.count(key)) continue;
    if (key.rfind("scan_axis_", 0) == 0 && allowed.count("scan_axis_")) continue;
    throw ConfigError(c.source() + ": unknown key '" + key + "'");
  }
}

Config load_config(const CommandOptions& o, bool required) {
  if (!o.config) {
    if (required) throw ConfigError("--config is required");
    return {};
  }
  return Config::load(*o.config);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
  f.close();
  if (!f) throw InputError("failed writing " + path.string());
}

std::filesystem::path prepare_dir(const CommandOptions& o) {
  const auto dir = resolve_output_dir(o);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw InputError("cannot create output directory " + dir.string());
  }
  return dir;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const CommandOptions& o, const Config& effective) {
  std::ostringstream m;
  m << "# rydcav " << command << " manifest\n";
  m << "# version: " << kVersion << '\n';
  m << "# timestamp: " << utc_timestamp() << '\n';
  m << "# config: " << (o.config ? o.config->string() : std::string("<none>")) << '\n';
  m << "# output: " << dir.string() << '\n';
  if (o.workers) m << "# workers: " << *o.workers << '\n';
  m << "# Re-run with: rydcav " << command << " --config <this file>\n";
  m << effective.to_text();
  write_file(dir / (command + "_manifest.txt"), m.str());
}

unsigned workers_of(const CommandOptions& o) { return o.workers.value_or(1u); }

std::string csv_text(const auto& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

}  // namespace

std::filesystem::path resolve_output_dir(const CommandOptions& options) {
  if (options.out) return *options.out;
  if (const char* env = std::getenv("RYDCAV_OUT"); env && *env) return env;
  return ".";
}

int cmd_rabi(const CommandOptions& o, std::ostream& log) {
  Config c = load_config(o, true);
  check_keys(c, {"t_end", "dt", "sample_interval"}, true);
  const PhysicalParams p = params_from_config(c);
  if (o.dt) c.set("dt", *o.dt);
  IntegrationOptions io;
  io.t_end = c.get_double("t_end", 10.0);
  io.dt = c.get_double("dt", default_step(p));
  io.sample_interval = c.get_double("sample_interval", 0.01);
  c.set("t_end", io.t_end);
  c.set("dt", io.dt);
  c.set("sample_interval", io.sample_interval);

  const auto dir = prepare_dir(o);
  io.model = DynamicsModel::full;
  const Trajectory full = integrate(SingleExcState::photon(), p, io);
  io.model = DynamicsModel::adiabatic;
  const Trajectory adiabatic = integrate(SingleExcState::photon(), p, io);
  for (const auto& w : adiabatic.warnings) log << "warning: " << w << '\n';

  write_file(dir / "rabi_full.csv",
             csv_text([&](std::ostream& s) { write_trajectory_csv(s, full); }));
  write_file(dir / "rabi_adiabatic.csv",
             csv_text([&](std::ostream& s) { write_trajectory_csv(s, adiabatic); }));
  write_manifest(dir, "rabi", o, c);

  double gap = 0.0;
  for (std::size_t i = 0; i < full.states.size(); ++i) {
    gap = std::max({gap, std::abs(std::norm(full.states[i].c_b) - std::norm(adiabatic.states[i].c_b)),
                    std::abs(std::norm(full.states[i].c_r) - std::norm(adiabatic.states[i].c_r))});
  }
  log << "rabi: " << full.times.size() << " samples, dt = " << format_double(io.dt)
      << " us, max |full - adiabatic| population gap = " << format_double(gap) << '\n';
  return kExitOk;
}

int cmd_mcwf(const CommandOptions& o, std::ostream& log) {
  Config c = load_config(o, true);
  check_keys(c,
             {"alpha", "alpha_phase", "cutoff", "t_end", "dt", "sample_interval", "traces", "seed",
              "tail_tolerance"},
             true);
  const PhysicalParams p = params_from_config(c);
  if (o.seed) c.set("seed", std::to_string(*o.seed));
  if (o.traces) c.set("traces", std::to_string(*o.traces));
  if (o.cutoff) c.set("cutoff", std::to_string(*o.cutoff));
  if (o.dt) c.set("dt", *o.dt);

  const double alpha_abs = c.get_double("alpha");
  const double alpha_phase = c.get_double("alpha_phase", 0.0);
  const cplx alpha = alpha_phase == 0.0 ? cplx(alpha_abs, 0.0) : std::polar(alpha_abs, alpha_phase);
  const long long cutoff = c.get_int("cutoff", 50);
  const long long traces = c.get_int("traces", 100);
  const long long seed = c.get_int("seed", 0);
  if (cutoff < 1 || cutoff > 100000) throw ConfigError("cutoff out of range");
  if (traces < 1) throw ConfigError("traces must be >= 1");
  if (seed < 0) throw ConfigError("seed must be >= 0");

  EnsembleOptions eo;
  eo.trajectory.t_end = c.get_double("t_end", 10.0);
  eo.trajectory.dt = c.get_double("dt", 1e-3);
  eo.trajectory.sample_interval = c.get_double("sample_interval", 0.01);
  eo.n_traj = static_cast<std::size_t>(traces);
  eo.master_seed = static_cast<std::uint64_t>(seed);
  eo.workers = workers_of(o);
  const double tail = c.get_double("tail_tolerance", 1e-6);
  c.set("t_end", eo.trajectory.t_end);
  c.set("dt", eo.trajectory.dt);
  c.set("sample_interval", eo.trajectory.sample_interval);
  c.set("cutoff", std::to_string(cutoff));
  c.set("traces", std::to_string(traces));
  c.set("seed", std::to_string(seed));
  c.set("tail_tolerance", tail);

  const auto dir = prepare_dir(o);
  const FockLadderState psi0 = coherent_ladder(alpha, static_cast<int>(cutoff), tail);
  const EnsembleResult r = ensemble_average(psi0, p, eo);
  write_file(dir / "mcwf.csv", csv_text([&](std::ostream& s) { write_ensemble_csv(s, r); }));
  write_manifest(dir, "mcwf", o, c);
  log << "mcwf: " << r.n_traj << " trajectories, seed " << r.master_seed << ", jumps GammaE "
      << r.jump_counts[0] << " GammaR " << r.jump_counts[1] << " Kappa " << r.jump_counts[2]
      << '\n';
  return kExitOk;
}

int cmd_gate_scan(const CommandOptions& o, std::ostream& log) {
  Config c = load_config(o, true);
  check_keys(c,
             {"lattice", "spacing_um", "qubit_offset_sites", "c3", "angular_factors",
              "blockade_sign", "auto_resonance", "refine_resonance", "probe_delta", "scan_axis_"},
             true);

  const std::vector<double> dims_raw =
      c.has("lattice") ? c.get_doubles("lattice") : std::vector<double>{10, 10, 10};
  if (dims_raw.size() != 3) throw ConfigError("lattice needs three integers");
  std::array<int, 3> dims{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (dims_raw[i] < 1 || dims_raw[i] != std::floor(dims_raw[i]) || dims_raw[i] > 1000) {
      throw ConfigError("lattice dimensions must be positive integers");
    }
    dims[i] = static_cast<int>(dims_raw[i]);
  }
  const GateGeometry geom = build_geometry(dims, c.get_double("spacing_um", 0.37),
                                           c.get_double("qubit_offset_sites", 1.5));
  ForsterModel model;
  model.c3 = angular_from_mhz(c.get_double("c3"));
  if (c.has("angular_factors")) {
    const auto raw = c.get_doubles("angular_factors");
    if (raw.size() < 2 || raw.size() % 2 != 0) {
      throw ConfigError("angular_factors needs '<deg> <factor>' pairs");
    }
    for (std::size_t i = 0; i < raw.size(); i += 2) {
      model.angular_table.emplace_back(raw[i] * std::numbers::pi / 180.0, raw[i + 1]);
    }
  }
  const std::vector<cplx> v_m = forster_coupling(geom, model);

  const auto sites = static_cast<long long>(geom.atom_positions.size());
  if (c.has("n_atoms") && c.get_int("n_atoms") != sites) {
    throw ConfigError("n_atoms = " + std::to_string(c.get_int("n_atoms")) +
                      " does not match the lattice (" + std::to_string(sites) + " sites)");
  }
  c.set("n_atoms", std::to_string(sites));

  GateOptions go;
  go.delta = angular_from_mhz(c.get_double("probe_delta", 0.0));
  const long long sign = c.get_int("blockade_sign", 1);
  if (sign != 1 && sign != -1) throw ConfigError("blockade_sign must be 1 or -1");
  go.blockade_sign = static_cast<int>(sign);
  go.auto_resonance = c.get_bool("auto_resonance", true);
  go.refine_resonance = c.get_bool("refine_resonance", false);
  if (!go.auto_resonance && go.refine_resonance) {
    throw ConfigError("refine_resonance requires auto_resonance");
  }

  std::vector<ScanAxis> axes;
  for (int k = 1; c.has("scan_axis_" + std::to_string(k)); ++k) {
    ScanAxis a = parse_scan_axis(c.get_string("scan_axis_" + std::to_string(k)));
    if (a.key != "probe_delta" && !kPhysicsKeys.count(a.key)) {
      throw ConfigError("scan axis key '" + a.key + "' is not a physics parameter");
    }
    if (a.key == "n_atoms") throw ConfigError("n_atoms is fixed by the lattice");
    axes.push_back(std::move(a));
  }
  for (const auto& [key, value] : c.entries()) {
    if (key.rfind("scan_axis_", 0) != 0) continue;
    const std::string idx = key.substr(10);
    const bool numeric = !idx.empty() && idx.find_first_not_of("0123456789") == std::string::npos;
    if (!numeric || std::stoul(idx) < 1 || std::stoul(idx) > axes.size()) {
      throw ConfigError("scan axes must be numbered scan_axis_1, scan_axis_2, ... without gaps");
    }
  }

  const auto dir = prepare_dir(o);
  const ScanTable table = scan(c, axes, v_m, go, workers_of(o));
  write_file(dir / "scan.csv", csv_text([&](std::ostream& s) { write_scan_csv(s, table); }));
  write_file(dir / "geometry.csv",
             csv_text([&](std::ostream& s) { write_geometry_csv(s, geom, v_m); }));
  write_manifest(dir, "gate-scan", o, c);

  std::size_t flagged = 0;
  double best = 0.0;
  for (const auto& pt : table.points) {
    if (pt.status != "ok") ++flagged;
    if (std::isfinite(pt.fidelity)) best = std::max(best, pt.fidelity);
  }
  log << "gate-scan: " << table.points.size() << " rows, " << flagged
      << " flagged, max F_z = " << format_double(best) << '\n';
  return kExitOk;
}

int cmd_oracle_check(const CommandOptions& o, std::ostream& log) {
  Config c = load_config(o, false);
  check_keys(c, {"n_atoms", "cutoff", "traces", "seed"}, false);
  if (o.cutoff) c.set("cutoff", std::to_string(*o.cutoff));
  if (o.traces) c.set("traces", std::to_string(*o.traces));
  if (o.seed) c.set("seed", std::to_string(*o.seed));
  OracleSuiteOptions so;
  so.max_atoms = static_cast<int>(c.get_int("n_atoms", so.max_atoms));
  so.cutoff = static_cast<int>(c.get_int("cutoff", so.cutoff));
  const long long traces = c.get_int("traces", static_cast<long long>(so.mcwf_traces));
  const long long seed = c.get_int("seed", static_cast<long long>(so.seed));
  if (traces < 1) throw ConfigError("traces must be >= 1");
  if (seed < 0) throw ConfigError("seed must be >= 0");
  so.mcwf_traces = static_cast<std::size_t>(traces);
  so.seed = static_cast<std::uint64_t>(seed);
  so.workers = workers_of(o);
  c.set("n_atoms", std::to_string(so.max_atoms));
  c.set("cutoff", std::to_string(so.cutoff));
  c.set("traces", std::to_string(so.mcwf_traces));
  c.set("seed", std::to_string(so.seed));

  const auto checks = run_oracle_suite(so);
  std::ostringstream report;
  write_oracle_report(report, checks);
  const auto dir = prepare_dir(o);
  write_file(dir / "oracle_report.txt", report.str());
  write_manifest(dir, "oracle-check", o, c);
  log << report.str();
  for (const auto& ch : checks) {
    if (ch.status == CheckStatus::fail) return kExitOracleFailure;
  }
  return kExitOk;
}

int run_command(const std::string& name, const CommandOptions& options, std::ostream& log,
                std::ostream& err) {
  try {
    if (name == "rabi") return cmd_rabi(options, log);
    if (name == "mcwf") return cmd_mcwf(options, log);
    if (name == "gate-scan") return cmd_gate_scan(options, log);
    if (name == "oracle-check") return cmd_oracle_check(options, log);
    err << "error: unknown command '" << name << "'\n";
    return kExitInputError;
  } catch (const StepSizeTooLarge& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalError;
  }
}

}  // namespace rydcav
