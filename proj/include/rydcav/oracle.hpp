#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "rydcav/params.hpp"
#include "rydcav/states.hpp"

namespace rydcav {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxOracleAtoms = 4;
inline constexpr int kMaxOracleCutoff = 8;
inline constexpr std::size_t kMaxGateDimension = 1024;

// Brute-force N-atom system: atoms with levels {g, e, r} tensored with a
// photon ladder 0..fock_cutoff.
struct FullSystemSpec {
  int n_atoms = 1;
  std::vector<cplx> g;      // per-atom coupling, size n_atoms
  Eigen::MatrixXd v;        // pairwise |r r> shift, symmetric, zero diagonal (may be empty)
  int fock_cutoff = 1;

  // Uniform coupling g0 and uniform pair shift v0.
  static FullSystemSpec uniform(int n_atoms, double g0, double v0, int fock_cutoff);
};

enum Level { kG = 0, kE = 1, kR = 2 };

std::size_t full_dimension(const FullSystemSpec& sys);
// Basis index: atom_code * (cutoff + 1) + photons, atom_code = sum level_k 3^k.
std::size_t full_index(const FullSystemSpec& sys, const std::vector<int>& levels, int photons);

CMatrix build_hamiltonian(const FullSystemSpec& sys, const PhysicalParams& p);

// sqrt(gamma_e)|g><e| and sqrt(gamma_r)|g><r| per atom, then sqrt(kappa) b.
// Zero rates are skipped.
std::vector<CMatrix> collapse_operators(const FullSystemSpec& sys, const PhysicalParams& p);

CMatrix photon_number_operator(const FullSystemSpec& sys);
// Projector weight onto "any atom in `level`", i.e. sum_k |level_k><level_k|.
CMatrix level_population_operator(const FullSystemSpec& sys, Level level);

// H - (i/2) sum L^dagger L.
CMatrix effective_hamiltonian(const CMatrix& h, const std::vector<CMatrix>& collapse_ops);

// Max absolute row sum.
double infinity_norm(const CMatrix& m);

enum class DenseMethod { rk4, expm };

struct DenseTrajectory {
  std::vector<double> times;
  std::vector<CVector> states;
};

// i d psi / dt = H psi. RK4 requires dt <= 1 / (50 ||H||_inf); expm uses
// one exact propagator per sample interval.
DenseTrajectory evolve_dense(const CMatrix& h, const CVector& psi0, double t_end, double dt,
                             DenseMethod method = DenseMethod::rk4,
                             double sample_interval = 0.01);

// Column-stacked Lindblad superoperator, vec(A rho B) = (B^T (x) A) vec(rho).
CMatrix liouvillian(const CMatrix& h, const std::vector<CMatrix>& collapse_ops);

struct LindbladTrajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;  // smallest eigenvalue seen at any sample
};

// Lindblad evolution. RK4 applies the evolve_dense step rule to H_eff;
// expm exponentiates the superoperator once per sample interval (dt is
// ignored, dimension <= 64). Throws TraceError when |tr rho - 1| exceeds
// 1e-8 at any sample.
LindbladTrajectory lindblad_evolve(const CMatrix& h, const std::vector<CMatrix>& collapse_ops,
                                   const CMatrix& rho0, double t_end, double dt,
                                   double sample_interval = 0.01,
                                   DenseMethod method = DenseMethod::rk4);

// Dense single-atom vector of a Fock-ladder state (sys.n_atoms must be 1
// and the cutoffs must match).
CVector to_dense(const FockLadderState& s, const FullSystemSpec& sys);

// Gate system: ensemble atoms {g, e, r, p}, qubit atom {r', p'}, photons.
struct GateSystemSpec {
  int n_atoms = 1;
  std::vector<cplx> g;    // per-atom coupling
  std::vector<cplx> v;    // Forster coupling per ensemble atom
  int fock_cutoff = 1;
};

enum GateLevel { kGateG = 0, kGateE = 1, kGateR = 2, kGateP = 3 };
enum QubitLevel { kQubitR = 0, kQubitP = 1 };

std::size_t gate_dimension(const GateSystemSpec& sys);
std::size_t gate_index(const GateSystemSpec& sys, const std::vector<int>& levels, int qubit,
                       int photons);

CMatrix build_gate_hamiltonian(const GateSystemSpec& sys, const PhysicalParams& p);

// Weak coherent probe at offset `delta` (rad/us) and amplitude
// beta = drive_fraction * kappa, solved for the Lindblad steady state in the
// sector with at most one excitation. Returns 1 - sqrt(kappa) <b> / beta.
// Set v to zeros for the unblocked qubit.
cplx weak_probe_reflection(const GateSystemSpec& sys, const PhysicalParams& p, double delta,
                           double drive_fraction = 1e-3);

}  // namespace rydcav
