#pragma once

#include <stdexcept>
#include <string>

namespace cmpg {

// Base class for every domain error raised by the library. The CLI maps these
// to exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (bad JSON, bad rational literal, missing field).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed document that violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical routine could not produce a certified answer (singular system,
// iteration cap, node budget).
class SolverError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmpg
