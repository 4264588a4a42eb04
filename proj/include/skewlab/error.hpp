#pragma once

#include <stdexcept>
#include <string>

namespace skewlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A truncated continued fraction is not deep enough for the requested precision.
class InsufficientDepthError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point accumulation would exceed the caller's precision contract.
class PrecisionContractError : public Error {
 public:
  using Error::Error;
};

/// No admissible coprime multiplier exists in the construction window.
class InfeasibleRhoError : public Error {
 public:
  using Error::Error;
};

/// A requested operation is not available for this base map.
class UnsupportedBaseError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (angle lines, descriptors, configs, records).
class ParseError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace skewlab
