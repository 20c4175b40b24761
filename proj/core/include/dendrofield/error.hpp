#pragma once

#include <stdexcept>
#include <string>

namespace dendrofield {

/// Bad input: a parameter, grid size, config key or file that violates a
/// precondition. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure during computation (non-finite state, singular pivot, missing
/// root). The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dendrofield
