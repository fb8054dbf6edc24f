#pragma once

#include <stdexcept>
#include <string>

namespace pirlab {

// Base of every error raised by the library. Callers that only care about
// "the protocol refused" can catch this; finer types exist for tests and the
// CLI exit-code mapping.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FieldMismatch : public Error {
 public:
  FieldMismatch() : Error("arithmetic between elements of different fields") {}
};

class NonInvertible : public Error {
 public:
  NonInvertible() : Error("zero has no multiplicative inverse") {}
};

class SingularMatrix : public Error {
 public:
  SingularMatrix() : Error("linear system is singular") {}
};

// Bad parameters for an operation (out-of-range theta, unsupported N, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownScheme : public Error {
 public:
  explicit UnknownScheme(const std::string& what) : Error("unknown scheme: " + what) {}
};

class MalformedQuery : public Error {
 public:
  using Error::Error;
};

class PoolExhausted : public Error {
 public:
  PoolExhausted() : Error("common randomness pool exhausted") {}
};

// Raised when an exact enumeration would exceed its configured cap.
class SpaceTooLarge : public Error {
 public:
  using Error::Error;
};

class UncharacterizedRegime : public Error {
 public:
  UncharacterizedRegime() : Error("uncharacterized regime") {}
};

}  // namespace pirlab
