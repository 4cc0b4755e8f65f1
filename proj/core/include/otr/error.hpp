#pragma once

#include <stdexcept>
#include <string>

namespace otr {

// Base class for every error raised by the library. Messages are prefixed
// with the module that raised them ("data: ...", "optimizer: ...").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input: malformed files, bad configuration, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown: non-finite objectives, degenerate solutions,
// non-convergent fits.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The anchor coefficient of an estimate is (numerically) zero, so the
// estimate cannot be scale-normalized.
class DegenerateAnchorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace otr
