#pragma once

#include <stdexcept>
#include <string>

namespace cntnode {

/// Input or configuration rejected before any computation ran.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to produce a result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive integration gave up (step-size underflow or step budget exhausted).
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}

  /// Simulation time (seconds) at which the integrator failed.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A completed computation violated one of its stated invariants.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cntnode
