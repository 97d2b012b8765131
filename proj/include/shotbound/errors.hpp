#pragma once

#include <stdexcept>
#include <string>

namespace shotbound {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not agree (non-square, mismatched dims, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Object violates a structural requirement (dim not a power of two,
// non-Hermitian generator, malformed circuit).
class StructureError : public Error {
 public:
  using Error::Error;
};

// Caller supplied invalid arguments (empty dataset, bad probability, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Quantity is not defined for the given arguments.
class UndefinedError : public Error {
 public:
  using Error::Error;
};

// Operation is not supported for this configuration (e.g. wrong data dimension).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

// An internal invariant was violated; indicates a bug rather than bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace shotbound
