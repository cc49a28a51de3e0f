#pragma once

#include <stdexcept>
#include <string>

namespace rerl {

/// Source text does not conform to the grammar or violates a module
/// invariant (duplicate function, arity mismatch, unknown function).
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Evaluation of an expression went wrong: unbound variable, no matching
/// case clause, bad built-in arguments and the like. Freezes the process.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A step was requested that is not among the enabled ones.
class NotEnabled : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rolling-back process ran out of history with obligations left.
class StuckRollback : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency of a reversible system is broken.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rerl
