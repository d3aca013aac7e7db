#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace selforg {

/// Input that fails a documented precondition. Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The cavity detunings do not admit a thermal stationary state.
class StationarityViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Requested microcanonical energy lies below the potential floor.
class Infeasible : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure of an otherwise valid computation. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotAFixedPoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientSamples : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RescaleFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A momentum left the configured bound; usually the time step is too large.
class NumericalBlowup : public NumericalError {
 public:
  NumericalBlowup(const std::string& what, std::int64_t step)
      : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

}  // namespace selforg
