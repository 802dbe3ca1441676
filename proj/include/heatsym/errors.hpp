#pragma once

#include <stdexcept>
#include <string>

namespace heatsym {

// Argument outside the domain of a closed-form function (pole, negative base
// with fractional exponent, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation requested on a form that the closed catalogue cannot express.
class UnsupportedForm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Transformation with a vanishing Jacobian entry (X' = 0 or T' = 0).
class SingularTransform : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Equivalence transform that would change the functional shape of d(u).
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Root bracketing failed; the message carries the bracket diagnostics.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time integration aborted (dt underflow, loss of positivity, non-finite state).
class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heatsym
