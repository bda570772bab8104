#pragma once

#include <stdexcept>
#include <string>

namespace oscidmd {

/// Raised when an input violates a documented precondition (shape, sign,
/// finiteness, malformed file). The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when data are numerically degenerate for the requested fit
/// (e.g. zero numerical rank for classical DMD). The CLI maps it to exit code 3.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace oscidmd
