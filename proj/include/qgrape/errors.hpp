#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qgrape {

// Bad input: non-Hermitian operators, negative rates, shape mismatches.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A propagated state left the physical set beyond the hard slack.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what), step_(0) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// A measurement outcome with zero probability but nonzero derivative;
// the classical Fisher information diverges there.
class SingularOutcomeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Pure-state Bloch input whose derivative leaves the sphere.
class InconsistentInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Rotation axis undefined because the vector to rotate has no x-z part.
class UndefinedRotationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qgrape
