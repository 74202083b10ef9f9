#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace l80 {

/// Malformed or inconsistent configuration (preset files, experiment configs, flags).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough samples for the requested operation.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time integration left the finite/bounded range.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(std::uint64_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  explicit BlowUp(std::uint64_t step) : BlowUp(step, "blow-up") {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

class NonFiniteState : public std::runtime_error {
 public:
  NonFiniteState() : std::runtime_error("non-finite state") {}
};

}  // namespace l80
