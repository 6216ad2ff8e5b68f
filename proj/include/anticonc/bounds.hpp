#pragma once

namespace anticonc {

/// Scale parameter of the small-ball event f <= eps * E f. Always > 0;
/// operations on the interval probability additionally need eps < 1.
class Epsilon {
 public:
  explicit Epsilon(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

struct GaussianParams {
  double mu;
  double sigma;

  GaussianParams(double mean, double stddev);
};

/// Error function, absolute error below 1e-12 everywhere.
double erf(double x);
/// Complementary error function with relative accuracy in the upper tail.
double erfc(double x);

/// Generic degree-d anti-concentration template min(1, C d eps^{1/d}).
/// The constant has no default.
double cw_bound(Epsilon eps, unsigned d, double c);

struct Lemma2Bound {
  /// min(1, (e^{1-eps} eps)^{1/2}), the value at the chosen Chernoff rate.
  double sharp;
  /// min(1, (e eps)^{1/2})
  double simple;
};

/// Chernoff bound on P{f <= eps Tr(Q22)}.
Lemma2Bound lemma2_bound(Epsilon eps);

/// min(1, (2 e eps)^{1/2}), bound on P{f <= eps E f}.
double theorem2_bound(Epsilon eps);

/// Chernoff rate (1 - eps) / (2 eps trace). Throws DomainError for eps >= 1
/// and DegenerateInstance for trace <= 0.
double chernoff_eta_star(Epsilon eps, double trace);

/// Standard normal mass of [-(1+eps) r/sigma, -(1-eps) r/sigma], i.e.
/// P{|x| <= eps |mu|} for x ~ N(mu, sigma^2) with r = |mu|.
double interval_prob_h(double r, double sigma, Epsilon eps);

/// Maximiser of r -> interval_prob_h(r, sigma, eps):
/// sigma * sqrt(log((1+eps)/(1-eps)) / (2 eps)).
double r_star(double sigma, Epsilon eps);

/// Worst case of interval_prob_h over r and sigma. Returns 0 below 1e-8 and
/// 1/2 above 1 - 1e-12.
double zeta(Epsilon eps);

/// eps / 2
double mean_anticonc_bound(const GaussianParams& g, Epsilon eps);
/// Exact P{|x| <= eps |mu|}; zero when mu = 0.
double mean_anticonc_exact(const GaussianParams& g, Epsilon eps);

}  // namespace anticonc
