#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksym {

/// Caller supplied something outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed edge-list or sidecar file. `line()` is 1-based, 0 when unknown.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// No guess is consistent with the adversary knowledge, so the oracle
/// distribution is undefined.
class EmptySupportError : public InputError {
 public:
  EmptySupportError() : InputError("no guess is consistent with the knowledge") {}
};

/// An exact enumeration would exceed its configured budget. The checkers
/// refuse rather than silently sample.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ksym
