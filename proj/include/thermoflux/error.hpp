#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thermoflux {

/// Base for every error raised by the library. Callers that only need to
/// report failures can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (e.g. ln of a non-positive value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid model, grid, solver or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Fields defined on different grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Density reached zero or became negative somewhere on the grid.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// Temperature reached zero or became negative somewhere on the grid.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced while recovering or advancing the state.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or root bracketing failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An analytic identity that must hold failed numerically. Indicates a bug in
/// this library rather than a property of the model.
class AnalysisInconsistency : public Error {
 public:
  using Error::Error;
};

/// Threshold scan saw no sign change. Carries the sampled sign profile.
class ThresholdNotFound : public Error {
 public:
  ThresholdNotFound(const std::string& what, std::vector<double> rho,
                    std::vector<int> signs)
      : Error(what), rho_(std::move(rho)), signs_(std::move(signs)) {}

  const std::vector<double>& rho() const noexcept { return rho_; }
  const std::vector<int>& signs() const noexcept { return signs_; }

 private:
  std::vector<double> rho_;
  std::vector<int> signs_;
};

}  // namespace thermoflux
