#include "anticonc/mgf.hpp"

#include <algorithm>
#include <cmath>

#include "anticonc/error.hpp"

namespace anticonc {

namespace {

void require_rate(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError("lambda must be a finite non-negative number");
}

double log_det_from_eigenvalues(const Vector& eigenvalues, double lambda) {
  double s = 0.0;
  for (double ev : eigenvalues) s += std::log1p(2.0 * lambda * ev);
  return s;
}

}  // namespace

double log_det_shifted(const QForm& q, double lambda) {
  require_rate(lambda);
  if (lambda == 0.0 || q.n == 0) return 0.0;
  return log_det_from_eigenvalues(sym_eigen(q.q22).eigenvalues, lambda);
}

LaplaceEval exact_laplace(const QForm& q, double lambda) {
  require_rate(lambda);
  LaplaceEval out;
  out.lambda = lambda;
  if (lambda == 0.0) {
    out.schur_term = q.q11;
    return out;
  }
  const double log_upper = -0.5 * log_det_shifted(q, lambda);
  out.upper = std::exp(log_upper);
  out.schur_term = q.n == 0 ? q.q11
                            : schur_value(q.q11, q.q12, q.q22, 0.5 / lambda,
                                          SchurBlock::lower);
  out.exact = std::exp(log_upper - lambda * std::max(0.0, out.schur_term));
  return out;
}

double laplace_upper(const QForm& q, double lambda) {
  return std::exp(-0.5 * log_det_shifted(q, lambda));
}

double det_trace_gap(const SymMat& q22, double eta) {
  if (!(eta > 0.0)) throw DomainError("det_trace_gap: eta must be positive");
  if (q22.dim() == 0) return 0.0;
  const Vector ev = sym_eigen(q22).eigenvalues;
  // e[k] = elementary symmetric polynomial of degree k in 2 eta lambda_i.
  std::vector<double> e(ev.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    // Q22 is PSD; roundoff below zero is dropped.
    const double a = 2.0 * eta * std::max(ev[i], 0.0);
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += a * e[k - 1];
  }
  double gap = 0.0;
  for (std::size_t k = ev.size(); k >= 2; --k) gap += e[k];
  return gap;
}

double chernoff_objective(const QForm& q, Epsilon eps, double eta, bool use_exact) {
  if (!(eta > 0.0)) throw DomainError("chernoff_objective: eta must be positive");
  const double trace = q.q22.trace();
  if (!(trace > 0.0))
    throw DegenerateInstance("chernoff_objective: Tr(Q22) must be positive");
  double log_value = eta * eps.value() * trace - 0.5 * log_det_shifted(q, eta);
  if (use_exact) {
    const LaplaceEval l = exact_laplace(q, eta);
    log_value -= eta * std::max(0.0, l.schur_term);
  }
  return std::exp(log_value);
}

}  // namespace anticonc
