#pragma once

#include <stdexcept>
#include <string>

namespace fk {

/// A caller broke a documented precondition (bad bracket, zero vector, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver its accuracy contract.
/// Carries the best value obtained before giving up.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double best_estimate = 0.0)
      : std::runtime_error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fk
