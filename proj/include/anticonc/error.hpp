#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anticonc {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite input (bad dimensions, NaN entries, bad config).
class InputError : public Error {
 public:
  using Error::Error;
};

// Parameter outside the mathematical domain of an operation (eps >= 1 for
// zeta, negative rate, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Polynomial with a monomial of total degree above two.
class DegreeError : public InputError {
 public:
  using InputError::InputError;
};

// Cholesky hit a non-positive pivot.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Quadratic form fails the PSD certificate; carries the minimum eigenvalue.
class NotPsdError : public Error {
 public:
  NotPsdError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// PSD within tolerance but with a linear term on the null space of Q22 that
// is too large to be roundoff.
class InconsistentInstance : public Error {
 public:
  using Error::Error;
};

// E f = 0 (f identically zero) or Tr(Q22) = 0 where a trace is required.
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

}  // namespace anticonc
