#pragma once

#include <stdexcept>
#include <string>

namespace pdmpkit {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input, reported with the offending field where known.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain on which a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of a bound does not hold for the given inputs.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A thinning envelope was exceeded by the true rate. Runs abort on this.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

class MissingLipschitz : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingC3 : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Leapfrog energy drift or non-finite state during simulation.
class SimulationAbort : public Error {
 public:
  using Error::Error;
};

class ZeroVariance : public Error {
 public:
  using Error::Error;
};

class InsufficientSignal : public Error {
 public:
  using Error::Error;
};

}  // namespace pdmpkit
