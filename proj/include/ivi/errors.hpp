#pragma once

#include <stdexcept>
#include <string>

namespace ivi {

// Configuration / precondition violations. CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numeric failures (singular systems, eigensolver breakdown). Exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Learning-rate / Lyapunov stability violation; carries the offending mode.
class StabilityError : public NumericError {
 public:
  StabilityError(const std::string& what, int mode)
      : NumericError(what), mode_index(mode) {}
  int mode_index = -1;
};

}  // namespace ivi
