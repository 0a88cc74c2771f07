#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avcons {

// Root of every error raised by the toolkit. The CLI maps subclasses to exit
// codes: InputError -> 2, IoError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed files, failed validation, degenerate inputs.
class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed record. Carries the file and 1-based line of the offending record.
class ParseError : public InputError {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : InputError(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Well-formed record that breaks a cross-field or cross-record invariant.
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// Frontend output that does not fit its declared shape or its manifest entry.
class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class EmptyInput : public InputError {
 public:
  using InputError::InputError;
};

// Only one class (genuine or fake) present where both are required.
class DegenerateLabels : public InputError {
 public:
  using InputError::InputError;
};

class MissingSystem : public InputError {
 public:
  using InputError::InputError;
};

class UnknownPerturbation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace avcons
