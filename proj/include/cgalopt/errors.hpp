#pragma once

#include <stdexcept>
#include <string>

namespace cgalopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent dimensions, invalid parameters, violated preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or oracle breakdown during a solve.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A maintained solver invariant was found broken.
class InvariantError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A convergence bound or acceptance check did not hold.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgalopt
