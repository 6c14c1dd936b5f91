#pragma once

#include <stdexcept>
#include <string>

namespace drsam {

// Base of every error raised by the library. Callers that only need to
// report and exit can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a type invariant (shape, domain, configuration range).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Two artifacts disagree on the feature schema (usually the feature count q).
class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace drsam
