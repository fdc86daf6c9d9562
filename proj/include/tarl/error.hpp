#pragma once

#include <stdexcept>
#include <string>

namespace tarl {

// Raised for bad user input: malformed files, invalid parameters, violated
// preconditions. The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when a computation cannot proceed (divergence, exhausted sample
// space). Maps to exit code 2 in the CLI.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tarl
