#pragma once

#include <stdexcept>
#include <string>

namespace pcuss {

// Root of every error thrown by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent or unsupported parameters (field families, dimensions).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed caller input: wrong lengths, duplicate points, incomplete tables.
class InputError : public Error {
 public:
  using Error::Error;
};

// Mathematically undefined operation, e.g. inverting zero.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The request is well formed but beyond what this build can compute.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class CorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcuss
