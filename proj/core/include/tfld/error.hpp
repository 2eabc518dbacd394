#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tfld {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value lies outside the domain of an operation (label index, beta, weights).
class InputDomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent hierarchy, panel or dimension setup.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A tunable parameter (epsilon, threshold) is out of range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Two round reports that cannot be compared.
class ComparisonError : public Error {
 public:
  using Error::Error;
};

// State conflicts in a session store (duplicate round, non-consecutive round).
class SessionConflictError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// One located problem in a CSV sheet. Row and column are 1-based physical
// positions in the file; 0 means "whole row" / "whole file".
struct Diagnostic {
  std::string sheet;
  std::size_t row = 0;
  std::size_t column = 0;
  std::string message;

  std::string to_string() const;
};

// Raised when a sheet fails validation. Carries every problem found; nothing
// is loaded when this is thrown.
class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace tfld
