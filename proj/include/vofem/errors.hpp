#pragma once

#include <stdexcept>
#include <string>

namespace vofem {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct LengthError : std::length_error {
  using std::length_error::length_error;
};

/// Iterative or direct linear solve that did not meet its contract.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

/// Adaptive quadrature that ran out of panels before meeting its tolerance.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate(estimate) {}
  double estimate;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vofem
