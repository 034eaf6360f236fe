#pragma once

#include <stdexcept>
#include <string>

namespace shelab {

// Bad input: violated preconditions, malformed files, invalid configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation ran but could not reach a required conclusion
// (unachievable budget, failed verification, inconclusive estimate).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace shelab
