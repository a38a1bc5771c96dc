#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace rydcav {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitNumericalError = 3,
  kExitOracleFailure = 4,
};

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;  // falls back to $RYDCAV_OUT, then "."
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> traces;
  std::optional<unsigned> workers;
  std::optional<double> dt;
  std::optional<int> cutoff;
};

// Each command writes its artifacts into the output directory and a
// `<command>_manifest.txt` that is itself a valid config reproducing the run.
// Errors propagate as exceptions; run_command maps them to exit codes.
int cmd_rabi(const CommandOptions& options, std::ostream& log);
int cmd_mcwf(const CommandOptions& options, std::ostream& log);
int cmd_gate_scan(const CommandOptions& options, std::ostream& log);
int cmd_oracle_check(const CommandOptions& options, std::ostream& log);

// Dispatches by subcommand name and converts exceptions into exit codes,
// printing the message to `err`.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& log,
                std::ostream& err);

std::filesystem::path resolve_output_dir(const CommandOptions& options);

}  // namespace rydcav
