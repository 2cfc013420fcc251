#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace frontlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the admissible domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inputs are valid but make the requested quantity undefined (e.g. zero mass).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A coefficient sits on the wrong side of the critical threshold.
class ThresholdError : public Error {
 public:
  using Error::Error;
};

/// A calibration target cannot be met.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A comparison family was evaluated exactly at its kink.
class KinkError : public Error {
 public:
  using Error::Error;
};

/// Too few trace entries in a fit window.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// A post-condition the library guarantees was violated; indicates a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// The explicit step was asked to exceed its stability limit.
class StepRejected : public Error {
 public:
  using Error::Error;
};

/// The integrator exhausted its step budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf appeared in the solution. Carries the offending state for dumping.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double t, std::vector<double> s,
                   std::vector<double> w)
      : Error(what), time(t), s_grid(std::move(s)), values(std::move(w)) {}

  double time;
  std::vector<double> s_grid;
  std::vector<double> values;
};

}  // namespace frontlab
