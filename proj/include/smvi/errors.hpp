#pragma once

#include <stdexcept>
#include <string>

namespace smvi {

// Dimension mismatch between operands.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Violated construction invariant or parameter constraint.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A set required to be nonempty turned out empty (or provably looks so).
struct EmptySetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative routine ran out of budget; the message carries the residual.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual(residual) {}
  double residual;
};

}  // namespace smvi
