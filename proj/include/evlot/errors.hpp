#pragma once

#include <stdexcept>
#include <string>

namespace evlot {

/// Invalid model parameters, states, or configuration values.
class InvalidParams : public std::invalid_argument {
 public:
  explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical routine exceeded its configured limits (state count, iterations).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature or Monte Carlo failed to reach the requested tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evlot
