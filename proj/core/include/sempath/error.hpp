#pragma once

#include <stdexcept>
#include <string>

namespace sempath {

// Raised when a numerical precondition fails at runtime: a matrix that must be
// positive definite is not, an eigensolver sees non-finite input, I - A is
// singular, and so on. Malformed arguments (shape mismatch, negative bounds)
// raise std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sempath

namespace sempath {

// Unreadable or malformed user input (CSV, pattern files, flag values).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sempath
