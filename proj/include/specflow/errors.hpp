#pragma once

#include <stdexcept>
#include <string>

namespace specflow {

/// Raised when inputs violate a documented precondition or schema.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a computation fails numerically (quadrature non-convergence,
/// non-invertible operator, undefined limit). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specflow
