#pragma once

#include "anticonc/bounds.hpp"
#include "anticonc/polyform.hpp"

namespace anticonc {

/// E exp(-lambda f(x)) for x ~ N(0, I) and its determinant bound.
struct LaplaceEval {
  double lambda = 0.0;
  /// det(I + 2 lambda Q22)^{-1/2} exp(-lambda * schur_term)
  double exact = 1.0;
  /// det(I + 2 lambda Q22)^{-1/2}
  double upper = 1.0;
  /// q11 - q12^T (Q22 + (2 lambda)^{-1} I)^{-1} q12; q11 at lambda = 0.
  double schur_term = 0.0;
};

/// Closed-form Laplace transform of a PSD quadratic form. lambda = 0 is
/// admitted and yields exact = upper = 1. The Schur term is non-negative in
/// exact arithmetic; roundoff below zero is not allowed to push `exact`
/// above `upper`.
LaplaceEval exact_laplace(const QForm& q, double lambda);

double laplace_upper(const QForm& q, double lambda);

/// log det(I + 2 lambda Q22), summed as log1p over eigenvalues.
double log_det_shifted(const QForm& q, double lambda);

/// det(I + 2 eta Q22) - (1 + 2 eta Tr(Q22)). Computed from the elementary
/// symmetric polynomials of order >= 2 in 2 eta lambda_i, so there is no
/// cancellation between the two sides.
double det_trace_gap(const SymMat& q22, double eta);

/// exp(eta eps Tr(Q22)) E exp(-eta f), with the expectation either exact or
/// replaced by the determinant bound. Throws DegenerateInstance when
/// Tr(Q22) = 0.
double chernoff_objective(const QForm& q, Epsilon eps, double eta, bool use_exact);

}  // namespace anticonc
