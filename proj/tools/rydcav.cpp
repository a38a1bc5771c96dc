#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rydcav/cli.hpp"

namespace {

struct Flags {
  std::string config, out;
  std::uint64_t seed = 0;
  std::size_t traces = 0;
  unsigned workers = 1;
  double dt = 0.0;
  int cutoff = 0;
};

void add_common(CLI::App* cmd, Flags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "Key-value config file (frequencies in MHz)");
  if (config_required) c->required();
  cmd->add_option("--out", f.out, "Output directory (default: $RYDCAV_OUT or .)");
  cmd->add_option("--workers", f.workers, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rydcav: blocked-ensemble cavity QED simulator"};
  app.set_version_flag("--version", rydcav::kVersion);
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 input/config error, 3 numerical error, 4 oracle check failed.\n"
      "Environment: RYDCAV_OUT sets the default output directory.");

  Flags f;
  auto* rabi = app.add_subcommand(
      "rabi", "Single-photon Rabi dynamics, full and adiabatic models "
              "(rabi_full.csv, rabi_adiabatic.csv)");
  add_common(rabi, f, true);
  rabi->add_option("--dt", f.dt, "Step size in us (overrides config)")->check(CLI::PositiveNumber);

  auto* mcwf = app.add_subcommand(
      "mcwf", "Monte-Carlo wave-function ensemble for a coherent drive (mcwf.csv)");
  add_common(mcwf, f, true);
  mcwf->add_option("--seed", f.seed, "Master seed (overrides config)");
  mcwf->add_option("--traces", f.traces, "Number of trajectories")->check(CLI::PositiveNumber);
  mcwf->add_option("--dt", f.dt, "Step size in us")->check(CLI::PositiveNumber);
  mcwf->add_option("--cutoff", f.cutoff, "Fock cutoff")->check(CLI::PositiveNumber);

  auto* scan = app.add_subcommand(
      "gate-scan", "Reflection coefficients and gate fidelity over a parameter grid "
                   "(scan.csv, geometry.csv)");
  add_common(scan, f, true);

  auto* oracle = app.add_subcommand(
      "oracle-check", "Dense-oracle consistency suite (oracle_report.txt)");
  add_common(oracle, f, false);
  oracle->add_option("--seed", f.seed, "Seed of the stochastic check");
  oracle->add_option("--traces", f.traces, "Trajectories of the stochastic check")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--cutoff", f.cutoff, "Fock cutoff of the Hermiticity check")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? rydcav::kExitOk : rydcav::kExitInputError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  rydcav::CommandOptions o;
  if (chosen->count("--config")) o.config = f.config;
  if (chosen->count("--out")) o.out = f.out;
  if (chosen->count("--workers")) o.workers = f.workers;
  if (chosen->get_option_no_throw("--seed") && chosen->count("--seed")) o.seed = f.seed;
  if (chosen->get_option_no_throw("--traces") && chosen->count("--traces")) o.traces = f.traces;
  if (chosen->get_option_no_throw("--dt") && chosen->count("--dt")) o.dt = f.dt;
  if (chosen->get_option_no_throw("--cutoff") && chosen->count("--cutoff")) o.cutoff = f.cutoff;
  return rydcav::run_command(chosen->get_name(), o, std::cout, std::cerr);
}
