#pragma once

#include <stdexcept>
#include <string>

namespace qmn {

/// Thrown when an input or configuration violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a numerical procedure cannot meet its contract
/// (diverging iteration, no sign change for a bracket, lost certificate).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qmn
