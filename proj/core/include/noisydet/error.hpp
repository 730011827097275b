#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisydet {

/// Raised when input data violates a domain invariant (bad box, duplicate
/// ids, probabilities out of range, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A ValidationError that can be traced back to a line of a text file.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace noisydet
