#pragma once

#include <stdexcept>
#include <string>

namespace altmin {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameters, inconsistent dimensions, step-size violations.
struct ConfigError : Error {
  using Error::Error;
};

/// An objective lacks the oracle an operation requires.
struct OracleError : Error {
  using Error::Error;
};

/// Runtime numerical failure: tolerance not reached, infeasible local
/// solution, iteration cap exceeded.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace altmin
