#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "anticonc/bounds.hpp"
#include "anticonc/polyform.hpp"

namespace anticonc {

/// Seeded generator for stream `stream` of run `seed`. Streams are derived
/// by feeding (seed, stream) as four 32-bit words into std::seed_seq, so
/// fuzz instance i always draws from stream i whatever the schedule.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

struct SpectralTerm {
  double weight;  ///< lambda_i > 0
  double offset;  ///< delta_i
};

/// f(x) = c + sum_i lambda_i (u_i^T x + delta_i)^2, so that under
/// x ~ N(0, I) the law of f is c plus a weighted noncentral chi-square sum.
struct SpectralForm {
  double c = 0.0;
  std::vector<SpectralTerm> terms;
  /// basis[i] is u_i, paired with terms[i].
  std::vector<Vector> basis;
  /// 1 + largest |entry| of the source matrix; tolerances are relative to it.
  double scale = 1.0;
};

double evaluate(const SpectralForm& s, std::span<const double> x);

/// Eigen-directions of Q22 with eigenvalue <= 1e-10 * max eigenvalue count
/// as null directions and must carry no linear coefficient.
inline constexpr double kNullSpaceCutoff = 1e-10;
inline constexpr double kNullSpaceLinearTol = 1e-8;

/// Completes the square along each eigen-direction of Q22. Throws
/// NotPsdError for non-PSD input and InconsistentInstance when the linear
/// term has a component on the null space above 1e-8 * scale.
SpectralForm reduce(const QForm& q);

enum class Method { inversion, montecarlo };

struct ProbEstimate {
  double p = 0.0;
  /// 99% score interval for Monte Carlo; p -/+ error bound for inversion.
  double ci_low = 0.0;
  double ci_high = 0.0;
  Method method = Method::inversion;
};

/// P{c + sum lambda_i (g_i + delta_i)^2 <= t}. The characteristic-function
/// inversion integral is taken along a parabola through the saddlepoint of
/// the Laplace transform, where the integrand decays like a Gaussian; the
/// trapezoid rule is refined until successive estimates agree to `tol`.
/// Requires a non-empty term list (DegenerateInstance otherwise) and tol in
/// [1e-10, 1e-4].
ProbEstimate cdf_inversion(const SpectralForm& s, double t, double tol = 1e-10);

/// The same probability from the real-axis form
///   1/2 - (1/pi) int_0^inf sin(theta(u)) / (u rho(u)) du
/// with adaptive Simpson on [0, U] and the analytic truncation bound folded
/// into the reported interval. Slow when there are fewer than three terms
/// and the threshold is small; kept as an independent cross-check.
ProbEstimate imhof_cdf(const SpectralForm& s, double t, double tol = 1e-8);

inline constexpr double kZ99 = 2.5758293035489004;

/// Wilson score interval at 99% for `hits` out of `n`.
ProbEstimate wilson_estimate(std::uint64_t hits, std::uint64_t n);

/// Frequency of f(x) <= threshold over seeded standard normal draws.
/// Requires samples >= 1000.
ProbEstimate monte_carlo(const QForm& q, double threshold, std::uint64_t samples,
                         std::uint64_t seed, std::uint64_t stream = 0);

/// One pass of draws shared by several thresholds.
std::vector<ProbEstimate> monte_carlo_multi(const QForm& q,
                                            std::span<const double> thresholds,
                                            std::uint64_t samples,
                                            std::uint64_t seed,
                                            std::uint64_t stream = 0);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample means of exp(-lambda f(x)) for each lambda, one shared pass.
std::vector<MeanEstimate> monte_carlo_laplace(const QForm& q,
                                              std::span<const double> lambdas,
                                              std::uint64_t samples,
                                              std::uint64_t seed,
                                              std::uint64_t stream = 0);

struct ProbOptions {
  Method method = Method::inversion;
  double tol = 1e-10;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// P{f(x) <= threshold}. The inversion route handles a form with no
/// continuous part as a point mass at c.
ProbEstimate prob_below(const QForm& q, double threshold, const ProbOptions& opts = {});

/// P{f(x) <= eps E f(x)}. Throws DegenerateInstance when E f = 0.
ProbEstimate small_ball_prob(const QForm& q, Epsilon eps, const ProbOptions& opts = {});

}  // namespace anticonc
