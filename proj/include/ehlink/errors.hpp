#pragma once

#include <stdexcept>
#include <string>

namespace ehlink {

// Argument validation failures throw std::invalid_argument; the types below
// cover the model-level failure modes.

/// Stationary distribution is not unique (more than one closed class).
class AmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node tried to spend more energy than it holds.
class CausalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observation has zero likelihood under every hidden state.
class DegenerateObservationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double final_span)
      : std::runtime_error(what), final_span_(final_span) {}
  double final_span() const { return final_span_; }

 private:
  double final_span_;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal model inconsistency (e.g. an indicator that contradicts the state).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace ehlink
