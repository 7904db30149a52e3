#pragma once

#include <stdexcept>
#include <string>

namespace nlwave {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations on arguments (bad grids, unsorted nodes, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two sequences that should live on the same grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// The sup-norm of the state left the admissible range, or a
// non-finite value appeared while evaluating the right-hand side.
class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, double time = 0.0) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// The step-size controller underflowed or max_steps was exceeded.
class StepFailure : public Error {
 public:
  using Error::Error;
};

// A convergence rate was requested from a zero error.
class DegenerateRate : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration or kernel file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlwave
