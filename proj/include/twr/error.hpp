#pragma once

#include <stdexcept>
#include <string>

namespace twr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation (negative power,
/// z_i < 1, index out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel failed to converge or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A solver stage failed; the message carries the stage/iteration context.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace twr
