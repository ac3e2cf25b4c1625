#pragma once

#include <stdexcept>
#include <string>

namespace modcont {

/// Argument outside the domain of the operation (radius out of range, point
/// outside a lattice, x = 0 for a fundamental solution, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation not defined for the given variant, e.g. derivative of a
/// tabulated oscillation function.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The Dini integral of the oscillation function diverges.
class NotDiniAdmissible : public std::domain_error {
 public:
  NotDiniAdmissible() : std::domain_error("not Dini-admissible") {}
};

/// A lattice offset scan would need more offsets per axis than allowed.
class OffsetCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An iterative method stopped at its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace modcont
