#include "rydcav/states.hpp"

#include <cmath>

#include "rydcav/errors.hpp"

namespace rydcav {

FockLadderState::FockLadderState(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 0) throw InvalidInput("Fock cutoff must be >= 0");
  const auto n = static_cast<std::size_t>(cutoff) + 1;
  c_b.assign(n, cplx{});
  c_e.assign(n, cplx{});
  c_r.assign(n, cplx{});
}

double FockLadderState::norm_sq() const {
  double s = 0.0;
  for (std::size_t n = 0; n < size(); ++n) {
    s += std::norm(c_b[n]) + std::norm(c_e[n]) + std::norm(c_r[n]);
  }
  return s;
}

double FockLadderState::mean_photon() const {
  double s = 0.0;
  for (std::size_t n = 1; n < size(); ++n) {
    s += static_cast<double>(n) * (std::norm(c_b[n]) + std::norm(c_e[n]) + std::norm(c_r[n]));
  }
  return s;
}

double FockLadderState::rydberg_population() const {
  double s = 0.0;
  for (const cplx& c : c_r) s += std::norm(c);
  return s;
}

double FockLadderState::excited_population() const {
  double s = 0.0;
  for (const cplx& c : c_e) s += std::norm(c);
  return s;
}

double FockLadderState::renormalize() {
  const double norm = std::sqrt(norm_sq());
  if (norm > 0.0) *this *= 1.0 / norm;
  return norm;
}

FockLadderState& FockLadderState::operator+=(const FockLadderState& o) {
  if (o.size() != size()) throw InvalidInput("Fock ladder cutoff mismatch");
  for (std::size_t n = 0; n < size(); ++n) {
    c_b[n] += o.c_b[n];
    c_e[n] += o.c_e[n];
    c_r[n] += o.c_r[n];
  }
  return *this;
}

FockLadderState& FockLadderState::operator*=(double s) {
  for (std::size_t n = 0; n < size(); ++n) {
    c_b[n] *= s;
    c_e[n] *= s;
    c_r[n] *= s;
  }
  return *this;
}

}  // namespace rydcav
