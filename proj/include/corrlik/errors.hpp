#pragma once

#include <stdexcept>
#include <string>

namespace corrlik {

// Bad inputs: domain violations, malformed files, invalid parameters.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Iteration budgets exhausted before a result could be certified.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace corrlik
