#include "anticonc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "anticonc/error.hpp"

namespace anticonc {

namespace {

constexpr double kSeriesLimit = 3.0;
constexpr double kZetaLow = 1e-8;
constexpr double kZetaHigh = 1.0 - 1e-12;

void require_below_one(Epsilon eps, const char* what) {
  if (!(eps.value() < 1.0))
    throw DomainError(std::string(what) + ": eps must lie in (0, 1)");
}

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_k 2^k x^{2k+1} / (1*3*...*(2k+1)).
// All terms share the sign of x, so there is no cancellation on |x| <= 3.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 0; k < 500; ++k) {
    term *= 2.0 * x2 / (2.0 * k + 3.0);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return 2.0 * std::numbers::inv_sqrtpi * std::exp(-x2) * sum;
}

// erfc(x) for x > 0 via the continued fraction
// sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz method.
double erfc_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 5000; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::numbers::inv_sqrtpi * std::exp(-x * x) / f;
}

}  // namespace

Epsilon::Epsilon(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError("eps must be a finite positive number");
}

GaussianParams::GaussianParams(double mean, double stddev)
    : mu(mean), sigma(stddev) {
  if (!std::isfinite(mean)) throw DomainError("mu must be finite");
  if (!(stddev > 0.0) || !std::isfinite(stddev))
    throw DomainError("sigma must be positive");
}

double erf(double x) {
  if (std::isnan(x)) return x;
  if (std::abs(x) <= kSeriesLimit) return erf_series(x);
  const double tail = erfc_continued_fraction(std::abs(x));
  return x > 0.0 ? 1.0 - tail : tail - 1.0;
}

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x > kSeriesLimit) return erfc_continued_fraction(x);
  if (x < -kSeriesLimit) return 2.0 - erfc_continued_fraction(-x);
  return 1.0 - erf_series(x);
}

double cw_bound(Epsilon eps, unsigned d, double c) {
  if (d == 0) throw DomainError("cw_bound: degree must be positive");
  if (!(c > 0.0) || !std::isfinite(c))
    throw DomainError("cw_bound: constant must be positive");
  const double v = c * d * std::pow(eps.value(), 1.0 / d);
  return std::min(1.0, v);
}

Lemma2Bound lemma2_bound(Epsilon eps) {
  const double e = eps.value();
  const double sharp = std::exp(0.5 * (1.0 - e + std::log(e)));
  const double simple = std::sqrt(std::numbers::e * e);
  return {std::min(1.0, sharp), std::min(1.0, simple)};
}

double theorem2_bound(Epsilon eps) {
  return std::min(1.0, std::sqrt(2.0 * std::numbers::e * eps.value()));
}

double chernoff_eta_star(Epsilon eps, double trace) {
  require_below_one(eps, "chernoff_eta_star");
  if (!(trace > 0.0))
    throw DegenerateInstance("chernoff_eta_star: Tr(Q22) must be positive");
  return (1.0 - eps.value()) / (2.0 * eps.value() * trace);
}

double interval_prob_h(double r, double sigma, Epsilon eps) {
  require_below_one(eps, "interval_prob_h");
  if (!(r > 0.0)) throw DomainError("interval_prob_h: r must be positive");
  if (!(sigma > 0.0)) throw DomainError("interval_prob_h: sigma must be positive");
  const double e = eps.value();
  const double z = r / (std::numbers::sqrt2 * sigma);
  const double lo = (1.0 - e) * z;
  const double hi = (1.0 + e) * z;
  // Both endpoints positive; use the complement once erf saturates.
  if (lo > 1.0) return 0.5 * (erfc(lo) - erfc(hi));
  return 0.5 * (erf(hi) - erf(lo));
}

double r_star(double sigma, Epsilon eps) {
  require_below_one(eps, "r_star");
  if (!(sigma > 0.0)) throw DomainError("r_star: sigma must be positive");
  // log((1+e)/(1-e)) / (2e) == atanh(e) / e
  const double e = eps.value();
  return sigma * std::sqrt(std::atanh(e) / e);
}

double zeta(Epsilon eps) {
  require_below_one(eps, "zeta");
  const double e = eps.value();
  if (e < kZetaLow) return 0.0;
  if (e > kZetaHigh) return 0.5;
  return interval_prob_h(r_star(1.0, eps), 1.0, eps);
}

double mean_anticonc_bound(const GaussianParams& /*g*/, Epsilon eps) {
  require_below_one(eps, "mean_anticonc_bound");
  return 0.5 * eps.value();
}

double mean_anticonc_exact(const GaussianParams& g, Epsilon eps) {
  require_below_one(eps, "mean_anticonc_exact");
  if (g.mu == 0.0) return 0.0;
  return interval_prob_h(std::abs(g.mu), g.sigma, eps);
}

}  // namespace anticonc
