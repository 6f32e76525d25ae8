#pragma once

#include <stdexcept>
#include <string>

namespace twisted {

/// Raised when an argument violates an operation's precondition.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to reach its tolerance within budget.
/// Carries the last estimate so callers can still report it.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double last_value, double last_rel_err)
      : std::runtime_error(what), last_value_(last_value), last_rel_err_(last_rel_err) {}

  double last_value() const noexcept { return last_value_; }
  double last_rel_err() const noexcept { return last_rel_err_; }

private:
  double last_value_;
  double last_rel_err_;
};

}  // namespace twisted
