#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "anticonc/linalg.hpp"

namespace anticonc {

/// Degree <= 2 polynomial c0 + lin^T x + x^T quad x in variables x1..xn.
/// The coefficient a of x_i x_j (i != j) is split as quad(i,j) = a/2.
struct Poly2 {
  std::size_t n = 0;
  double c0 = 0.0;
  Vector lin;
  SymMat quad;

  Poly2() = default;
  explicit Poly2(std::size_t dim) : n(dim), lin(dim, 0.0), quad(dim) {}

  double operator()(std::span<const double> x) const;

  friend bool operator==(const Poly2&, const Poly2&) = default;
};

/// f(x) = [1; x]^T Q [1; x] with Q = [[q11, q12^T], [q12, q22]].
struct QForm {
  std::size_t n = 0;
  double q11 = 0.0;
  Vector q12;
  SymMat q22;

  QForm() = default;
  explicit QForm(std::size_t dim) : n(dim), q12(dim, 0.0), q22(dim) {}
  QForm(double corner, Vector cross, SymMat block);

  /// The full (n+1) x (n+1) matrix.
  SymMat assembled() const;
  /// Splits an (n+1) x (n+1) matrix back into blocks.
  static QForm from_assembled(const SymMat& q);

  QForm scaled(double factor) const;
  /// Largest absolute entry of the assembled matrix.
  double scale() const noexcept;

  friend bool operator==(const QForm&, const QForm&) = default;
};

/// Grammar:
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := coeff ('*' factor)* | factor ('*' factor)*
///   factor := var ('^' digits)?
///   var    := 'x' digits            (1-based)
///   coeff  := decimal literal, optional exponent
/// Throws ParseError (with position) or DegreeError.
Poly2 parse_poly(std::string_view text);

/// Canonical text form; parse_poly(format_poly(p)) == p.
std::string format_poly(const Poly2& p);

QForm to_qform(const Poly2& p);
Poly2 to_poly(const QForm& q);

struct NonnegCertificate {
  bool passed = false;
  double min_eigenvalue = 0.0;
};

/// Advisory PSD check of the assembled matrix; does not throw on failure.
NonnegCertificate validate_nonneg(const QForm& q, double tol = kDefaultPsdTol);
/// Same check, throwing NotPsdError with the certificate on failure.
void require_nonneg(const QForm& q, double tol = kDefaultPsdTol);

/// q11 + 2 q12^T x + x^T Q22 x
double evaluate(const QForm& q, std::span<const double> x);

/// E f(x) under x ~ N(0, I): q11 + Tr(Q22).
double expectation(const QForm& q);

}  // namespace anticonc
