#pragma once

#include <stdexcept>
#include <string>

namespace distctrl {

// Mismatched lattices, vector-length disagreements.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inconsistent run parameters (grid geometry, schedules, config files).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A functional produced a non-finite value.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Preconditions of an optimality certificate could not be verified.
struct CertificateRefused : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace distctrl
