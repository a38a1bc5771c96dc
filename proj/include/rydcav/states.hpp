#pragma once

#include <vector>

#include "rydcav/params.hpp"

namespace rydcav {

// Single-excitation amplitudes: one photon in the cavity (c_b), one
// collective intermediate excitation (c_e) or one collective Rydberg
// excitation (c_r).
struct SingleExcState {
  cplx c_b{0.0, 0.0};
  cplx c_e{0.0, 0.0};
  cplx c_r{0.0, 0.0};

  double norm_sq() const { return std::norm(c_b) + std::norm(c_e) + std::norm(c_r); }

  // Preloaded single photon, atoms in the ground state.
  static SingleExcState photon() { return {cplx(1.0, 0.0), {}, {}}; }

  SingleExcState& operator+=(const SingleExcState& o) {
    c_b += o.c_b;
    c_e += o.c_e;
    c_r += o.c_r;
    return *this;
  }
  SingleExcState& operator*=(double s) {
    c_b *= s;
    c_e *= s;
    c_r *= s;
    return *this;
  }
  bool operator==(const SingleExcState&) const = default;
};

inline SingleExcState operator+(SingleExcState a, const SingleExcState& b) { return a += b; }
inline SingleExcState operator*(double s, SingleExcState a) { return a *= s; }

// The (c_b, c_r) pair that survives adiabatic elimination of |e>.
struct AdiabaticState {
  cplx c_b{0.0, 0.0};
  cplx c_r{0.0, 0.0};

  AdiabaticState& operator+=(const AdiabaticState& o) {
    c_b += o.c_b;
    c_r += o.c_r;
    return *this;
  }
  AdiabaticState& operator*=(double s) {
    c_b *= s;
    c_r *= s;
    return *this;
  }
};

inline AdiabaticState operator+(AdiabaticState a, const AdiabaticState& b) { return a += b; }
inline AdiabaticState operator*(double s, AdiabaticState a) { return a *= s; }

// Fock-ladder amplitudes c_x[n], n = 0..cutoff, for the three collective
// internal states. At most one atomic excitation exists by construction.
class FockLadderState {
 public:
  FockLadderState() = default;
  explicit FockLadderState(int cutoff);

  int cutoff() const { return cutoff_; }
  std::size_t size() const { return c_b.size(); }

  double norm_sq() const;
  // Photon number expectation sum_n n (|c_b,n|^2 + |c_e,n|^2 + |c_r,n|^2).
  double mean_photon() const;
  double rydberg_population() const;
  double excited_population() const;
  // Normalizes to unit norm; returns the norm before scaling (0 leaves the
  // state untouched).
  double renormalize();

  FockLadderState& operator+=(const FockLadderState& o);
  FockLadderState& operator*=(double s);

  std::vector<cplx> c_b, c_e, c_r;

 private:
  int cutoff_ = 0;
};

inline FockLadderState operator+(FockLadderState a, const FockLadderState& b) { return a += b; }
inline FockLadderState operator*(double s, FockLadderState a) { return a *= s; }

}  // namespace rydcav
