#pragma once

#include <stdexcept>
#include <string>

namespace ltail {

/// Argument outside the mathematical domain of an operation (including
/// requests for infinite moments).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative or adaptive routine stopped before reaching its tolerance.
/// Carries the best estimate seen so far and its error bound.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// The model cannot supply what was asked (derivative order beyond its
/// smoothness, a second-order term it does not have).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The selected evaluation method for the sub-aggregate law cannot serve
/// the request (e.g. exact n = 2 formulas asked for n = 3).
class MethodError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed textual input (model spec strings, weight lists, configs).
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ltail
