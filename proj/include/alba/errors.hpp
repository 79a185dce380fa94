#pragma once

#include <stdexcept>
#include <string>

namespace alba {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration, violated type invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure at runtime (root not bracketed, overflow, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A performance metric was requested on a state where it is undefined
/// (e.g. jobs per warm server with no warm servers).
class UndefinedMetricError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Mass escaped past the largest representable queue length in an
/// unbounded-buffer run.
class TruncationOverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace alba
