#pragma once

#include <stdexcept>
#include <string>

namespace gssh {

/// Invalid user-facing input (bad parameter, malformed config). Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a meaningful result. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroCoupling : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidSize : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DimensionMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class GaplessModel : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoCriticalPhase : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gssh
