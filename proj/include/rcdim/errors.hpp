#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcdim {

/// Raised when an iteration or integration leaves the representable range.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration diverged; `step` is the index of the offending RK4 step.
class BlowupError : public NumericalError {
 public:
  BlowupError(std::size_t step, const std::string& what)
      : NumericalError(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(double last_residual, const std::string& what)
      : NumericalError(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Operation requires a contracting reservoir (mu < 1).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnsupportedConfiguration : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// No scaling window passed the stability test; use a manual fit range.
class EstimationFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rcdim
