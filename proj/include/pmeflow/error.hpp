#pragma once

#include <stdexcept>
#include <string>

namespace pmeflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented constraint (p = 1, m <= n, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a broken numerical invariant.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The solution dropped to the positivity floor during time stepping.
class PositivityError : public NumericalError {
 public:
  PositivityError(double time, double min_value)
      : NumericalError("positivity breach at t=" + std::to_string(time) +
                       " (min u = " + std::to_string(min_value) + ")"),
        time_(time),
        min_value_(min_value) {}

  double time() const noexcept { return time_; }
  double min_value() const noexcept { return min_value_; }

 private:
  double time_;
  double min_value_;
};

/// Malformed scenario text or an unknown key.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pmeflow
