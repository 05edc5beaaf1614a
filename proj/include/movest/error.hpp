#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace movest {

// Bad arguments or malformed input. Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class InvalidScoreVector : public InputError {
 public:
  using InputError::InputError;
};

// A closed form was requested for an instance outside its domain (e.g. tied winners).
class NotApplicableError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Search exceeded its configured work limit. Maps to CLI exit code 3.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace movest
