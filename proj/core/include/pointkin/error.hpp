#pragma once

#include <stdexcept>
#include <string>

namespace pointkin {

/// Base of every exception thrown by the library. `kind()` is a stable,
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A constructor or operation argument violated a stated invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

/// A time-dependent function was evaluated outside its domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class NumericsError : public Error {
 public:
  explicit NumericsError(const std::string& message) : Error("numerics", message) {}
};

/// Failure while advancing a sample path. Carries the step index and time.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& message, long step, double time)
      : Error("simulation", message), step_(step), time_(time) {}

  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

/// A fixed-step Monte Carlo step whose event probabilities sum above one.
class StepTooLargeError : public SimulationError {
 public:
  StepTooLargeError(const std::string& message, long step, double time, double max_dt)
      : SimulationError(message, step, time), max_dt_(max_dt) {}

  /// Largest step (1 / total rate) that satisfies the precondition.
  double max_dt() const noexcept { return max_dt_; }

 private:
  double max_dt_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = -1)
      : Error("config", message), line_(line) {}

  /// 1-based line of the offending input, or -1 when not applicable.
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace pointkin
