#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rydcav {

enum class CheckStatus { pass, fail, deviation };

std::string to_string(CheckStatus status);

struct OracleCheck {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  double delta = 0.0;      // measured discrepancy
  double tolerance = 0.0;
  std::string detail;
};

struct OracleSuiteOptions {
  int max_atoms = 4;              // collective checks run for N = 2..max_atoms
  int cutoff = 1;                 // Fock cutoff of the Hermiticity check
  std::size_t mcwf_traces = 2000;  // trajectories of the MCWF/Lindblad check
  std::uint64_t seed = 7;
  unsigned workers = 1;
};

// Dense-oracle invariant suite. Throws DimensionExceeded up front when the
// requested sizes exceed the oracle caps.
std::vector<OracleCheck> run_oracle_suite(const OracleSuiteOptions& options);

// One line per check: "<status> <name> delta=<d> tol=<t> <detail>".
void write_oracle_report(std::ostream& out, const std::vector<OracleCheck>& checks);

// Cross-checks shared with the acceptance runs.

// Max population error between dense N-atom single-photon dynamics with
// uniform g0 and the reduced model with g = sqrt(N) g0, at the strong
// coupling single-photon preset (g = 2 pi x 10 MHz), over t_end us.
double collective_enhancement_error(int n_atoms, double pair_shift_mhz, double t_end);

struct McwfLindbladComparison {
  double max_z = 0.0;  // largest |mcwf - lindblad| / stderr over samples and observables
  std::size_t samples = 0;
  double max_abs_photon = 0.0;
  double max_abs_rydberg = 0.0;
};

// Cutoff 5, alpha = 1 coherent drive under scaled-down parameters, sampled
// every 0.1 us up to 5 us (50 samples after t = 0).
McwfLindbladComparison compare_mcwf_lindblad(std::size_t n_traj, std::uint64_t seed,
                                             unsigned workers);

}  // namespace rydcav
