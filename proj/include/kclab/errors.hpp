#pragma once

#include <stdexcept>
#include <string>

namespace kclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not match (or a dimension is out of the supported range).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value-type invariant (Hermiticity, unitarity, POVM completeness, ...) failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

/// A numerical result left its admissible range by more than the tolerance.
class NumericalFault : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The protocol does not have the shape an operation requires.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kclab
