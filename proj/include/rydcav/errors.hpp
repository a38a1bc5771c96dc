#pragma once

#include <stdexcept>
#include <string>

namespace rydcav {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: configuration, preconditions, dimension caps.
class InputError : public Error {
 public:
  using Error::Error;
};

// Failure of a numerical procedure on otherwise valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionExceeded : public InputError {
 public:
  using InputError::InputError;
};

class GeometryError : public InputError {
 public:
  using InputError::InputError;
};

class CutoffTooSmall : public InputError {
 public:
  CutoffTooSmall(const std::string& what, double tail_mass)
      : InputError(what), tail_mass_(tail_mass) {}
  double tail_mass() const { return tail_mass_; }

 private:
  double tail_mass_;
};

class SingularElimination : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularResponse : public NumericalError {
 public:
  SingularResponse(const std::string& what, double delta)
      : NumericalError(what), delta_(delta) {}
  /// Probe offset (rad/us) at which the denominator vanished.
  double delta() const { return delta_; }

 private:
  double delta_;
};

class StepSizeTooLarge : public NumericalError {
 public:
  StepSizeTooLarge(const std::string& what, double suggested_dt)
      : NumericalError(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

// The jump sampler raises the same condition when the per-step jump
// probability gets too large.
using StepTooLarge = StepSizeTooLarge;

class ImpossibleJump : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TraceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rydcav
