#pragma once

#include <stdexcept>
#include <string>

namespace efimov {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result would underflow to zero (e.g. e^{-x} for huge x); distinct from a domain error.
class UnderflowError : public std::underflow_error {
 public:
  using std::underflow_error::underflow_error;
};

/// Iterative procedure exhausted its budget.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The mass ratio is sub-critical: mu/nu * W(1)^2 <= 1/4, so no geometric tower exists.
class NoEfimovRegime : public std::domain_error {
 public:
  NoEfimovRegime(const std::string& what, double coupling)
      : std::domain_error(what), coupling_(coupling) {}
  /// mu/nu * W(1)^2 of the rejected configuration.
  double coupling() const noexcept { return coupling_; }

 private:
  double coupling_;
};

class BracketFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// w0(r0) and w0'(r0) both vanished numerically.
class DegenerateInner : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepSizeUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Finite-difference box too small to contain the requested eigenfunction.
class InsufficientDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace efimov
