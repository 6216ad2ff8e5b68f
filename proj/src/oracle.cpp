#include "anticonc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>

#include "anticonc/error.hpp"

namespace anticonc {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double evaluate(const SpectralForm& s, std::span<const double> x) {
  double v = s.c;
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    const double y = dot(s.basis[i], x) + s.terms[i].offset;
    v += s.terms[i].weight * y * y;
  }
  return v;
}

SpectralForm reduce(const QForm& q) {
  require_nonneg(q);
  SpectralForm out;
  out.scale = 1.0 + q.scale();
  out.c = q.q11;
  if (q.n == 0) return out;

  const EigenDecomp e = sym_eigen(q.q22);
  const double cutoff = kNullSpaceCutoff * std::max(0.0, e.eigenvalues.front());
  for (std::size_t j = 0; j < q.n; ++j) {
    const double lambda = e.eigenvalues[j];
    Vector u = e.basis.column(j);
    const double b = dot(u, q.q12);
    if (lambda > cutoff && lambda > 0.0) {
      out.terms.push_back({lambda, b / lambda});
      out.basis.push_back(std::move(u));
      out.c -= b * b / lambda;
    } else if (std::abs(b) > kNullSpaceLinearTol * out.scale) {
      throw InconsistentInstance(
          "reduce: linear term has a component outside the range of Q22");
    }
  }
  return out;
}

namespace {

using cplx = std::complex<double>;

// Law of x0 + sum w_i (g_i + d_i)^2 shifted so that P{...<= t} becomes
// P{sum <= x} with x = t - c.
struct Mixture {
  std::vector<double> w;
  std::vector<double> d2;

  explicit Mixture(const SpectralForm& s) {
    for (const SpectralTerm& t : s.terms) {
      w.push_back(t.weight);
      d2.push_back(t.offset * t.offset);
    }
  }

  // log E exp(-s Y)
  cplx log_laplace(cplx s) const {
    cplx k = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const cplx a = 1.0 + 2.0 * s * w[i];
      k += -0.5 * std::log(a) - s * w[i] * d2[i] / a;
    }
    return k;
  }

  double dlog_laplace(double s) const {
    double k = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double a = 1.0 + 2.0 * s * w[i];
      k -= w[i] / a + w[i] * d2[i] / (a * a);
    }
    return k;
  }

  double d2log_laplace(double s) const {
    double k = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double a = 1.0 + 2.0 * s * w[i];
      k += 2.0 * w[i] * w[i] / (a * a) + 4.0 * w[i] * w[i] * d2[i] / (a * a * a);
    }
    return k;
  }
};

// Minimiser over s > 0 of log L(s) + s x - log s; the function is convex,
// its derivative runs from -inf at 0+ to x > 0 at infinity.
double saddlepoint(const Mixture& m, double x) {
  auto slope = [&](double s) { return m.dlog_laplace(s) + x - 1.0 / s; };
  double lo = 1.0 / x;
  double hi = lo;
  if (slope(lo) < 0.0) {
    while (slope(hi) < 0.0) hi *= 2.0;
    lo = hi / 2.0;
  } else {
    while (slope(lo) >= 0.0) lo /= 2.0;
    hi = lo * 2.0;
  }
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-13; ++it) {
    const double mid = std::sqrt(lo * hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

ProbEstimate interval_estimate(double p, double err, Method method) {
  p = std::clamp(p, 0.0, 1.0);
  return {p, std::max(0.0, p - err), std::min(1.0, p + err), method};
}

void require_inversion_args(const SpectralForm& s, double tol) {
  if (s.terms.empty())
    throw DegenerateInstance("cdf: form has no continuous part (point mass at c)");
  if (!(tol >= 1e-10 && tol <= 1e-4))
    throw DomainError("cdf: tol must lie in [1e-10, 1e-4]");
}

}  // namespace

ProbEstimate cdf_inversion(const SpectralForm& s, double t, double tol) {
  require_inversion_args(s, tol);
  const double x = t - s.c;
  if (!(x > 0.0)) return {0.0, 0.0, 0.0, Method::inversion};

  const Mixture m(s);
  const double sigma = saddlepoint(m, x);
  const double curv = m.d2log_laplace(sigma) + 1.0 / (sigma * sigma);
  const double gamma = curv / (2.0 * x);
  const double vscale = 1.0 / std::sqrt(curv);

  // Contour s(v) = sigma + i v - gamma v^2, ds/dv = i - 2 gamma v.
  auto integrand = [&](double v) {
    const cplx sv(sigma - gamma * v * v, v);
    const cplx e = m.log_laplace(sv) + sv * x - std::log(sv);
    return std::exp(e) * cplx(-2.0 * gamma * v, 1.0);
  };

  // Truncation: march in steps of half the saddle width until the
  // integrand stays negligible.
  const double h0 = 0.5 * vscale;
  const double small = 1e-3 * tol / vscale;
  std::vector<double> values{integrand(0.0).imag()};
  int quiet = 0;
  double last_mag = std::abs(integrand(0.0));
  for (std::size_t j = 1; j < 4000; ++j) {
    const cplx f = integrand(j * h0);
    values.push_back(f.imag());
    last_mag = std::abs(f);
    quiet = last_mag < small ? quiet + 1 : 0;
    if (quiet >= 4 && j * 0.5 >= 4.0) break;
  }
  const std::size_t points = values.size();
  const double span_v = (points - 1) * h0;
  const double truncation = last_mag * vscale / std::numbers::pi;

  auto trapezoid = [&](double h, double sum) { return h * (sum - 0.5 * values[0]); };
  double sum = 0.0;
  for (double v : values) sum += v;
  double h = h0;
  double estimate = trapezoid(h, sum);
  double diff = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 16; ++level) {
    const std::size_t intervals = static_cast<std::size_t>(std::llround(span_v / h));
    double mid = 0.0;
    for (std::size_t j = 0; j < intervals; ++j) mid += integrand((j + 0.5) * h).imag();
    sum += mid;
    h *= 0.5;
    const double refined = trapezoid(h, sum);
    diff = std::abs(refined - estimate) / std::numbers::pi;
    estimate = refined;
    if (diff < 0.25 * tol && level >= 1) break;
  }
  // Roundoff floor relative to the integrand's own magnitude.
  const double floor = 1e-15 * std::abs(values[0]) * vscale;
  return interval_estimate(estimate / std::numbers::pi,
                           diff + truncation + floor, Method::inversion);
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  double error = 0.0;
  int budget = 2'000'000;
};

double simpson_rec(SimpsonState& st, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  st.budget -= 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || st.budget <= 0 || std::abs(delta) <= 15.0 * tol) {
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

ProbEstimate imhof_cdf(const SpectralForm& s, double t, double tol) {
  require_inversion_args(s, tol);
  const double x = t - s.c;
  if (!(x > 0.0)) return {0.0, 0.0, 0.0, Method::inversion};

  const Mixture m(s);
  const std::size_t k = m.w.size();
  double sum_w = 0.0;
  double sum_log_w = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum_w += m.w[i] * (1.0 + m.d2[i]);
    sum_log_w += std::log(m.w[i]);
  }

  auto theta = [&](double u) {
    double th = -0.5 * x * u;
    for (std::size_t i = 0; i < k; ++i) {
      const double lu = m.w[i] * u;
      th += 0.5 * (std::atan(lu) + m.d2[i] * lu / (1.0 + lu * lu));
    }
    return th;
  };
  auto log_rho = [&](double u) {
    double r = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double lu2 = m.w[i] * m.w[i] * u * u;
      r += 0.25 * std::log1p(lu2) + 0.5 * m.d2[i] * lu2 / (1.0 + lu2);
    }
    return r;
  };
  const std::function<double(double)> f = [&](double u) {
    if (u == 0.0) return 0.5 * (sum_w - x);
    return std::sin(theta(u)) / (u * std::exp(log_rho(u)));
  };
  // Bound on |int_U^inf f|: rho(u) >= prod (lambda_i u)^{1/2} e^{...(U)}.
  auto tail_bound = [&](double u) {
    double noncentral = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double lu2 = m.w[i] * m.w[i] * u * u;
      noncentral += 0.5 * m.d2[i] * lu2 / (1.0 + lu2);
    }
    const double log_den = std::log(std::numbers::pi * 0.5 * k) +
                           0.5 * k * std::log(u) + 0.5 * sum_log_w + noncentral;
    return std::exp(-log_den);
  };

  const double half_period = std::numbers::pi / (0.5 * (x + sum_w));
  constexpr std::size_t kMaxPanels = 20000;
  double upper = half_period;
  while (tail_bound(upper) > 0.5 * tol &&
         std::exp(log_rho(upper)) * upper < 1e14 &&
         upper < kMaxPanels * half_period)
    upper *= 2.0;
  upper = std::min(upper, kMaxPanels * half_period);

  const auto panels =
      static_cast<std::size_t>(std::ceil(upper / half_period));
  const double width = upper / panels;
  SimpsonState st{f};
  double integral = 0.0;
  double fa = f(0.0);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = p * width;
    const double b = a + width;
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    const double whole = width / 6.0 * (fa + 4.0 * fm + fb);
    integral += simpson_rec(st, a, b, fa, fm, fb, whole,
                            0.25 * tol * std::numbers::pi / panels, 40);
    fa = fb;
  }
  const double p = 0.5 - integral / std::numbers::pi;
  const double err = st.error / std::numbers::pi + tail_bound(upper);
  return interval_estimate(p, err, Method::inversion);
}

ProbEstimate wilson_estimate(std::uint64_t hits, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(hits) / nn;
  const double z2 = kZ99 * kZ99;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      kZ99 * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {phat, std::clamp(center - half, 0.0, phat),
          std::clamp(center + half, phat, 1.0), Method::montecarlo};
}

namespace {

constexpr std::uint64_t kMinSamples = 1000;

template <typename Visit>
void draw_values(const QForm& q, std::uint64_t samples, std::uint64_t seed,
                 std::uint64_t stream, Visit&& visit) {
  if (samples < kMinSamples)
    throw DomainError("monte_carlo: need at least 1000 samples");
  std::mt19937_64 rng = make_rng(seed, stream);
  std::normal_distribution<double> normal;
  Vector x(q.n);
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (double& xi : x) xi = normal(rng);
    visit(evaluate(q, x));
  }
}

}  // namespace

std::vector<ProbEstimate> monte_carlo_multi(const QForm& q,
                                            std::span<const double> thresholds,
                                            std::uint64_t samples,
                                            std::uint64_t seed,
                                            std::uint64_t stream) {
  std::vector<std::uint64_t> hits(thresholds.size(), 0);
  draw_values(q, samples, seed, stream, [&](double f) {
    for (std::size_t j = 0; j < thresholds.size(); ++j)
      if (f <= thresholds[j]) ++hits[j];
  });
  std::vector<ProbEstimate> out;
  out.reserve(thresholds.size());
  for (std::uint64_t h : hits) out.push_back(wilson_estimate(h, samples));
  return out;
}

ProbEstimate monte_carlo(const QForm& q, double threshold, std::uint64_t samples,
                         std::uint64_t seed, std::uint64_t stream) {
  const double t[] = {threshold};
  return monte_carlo_multi(q, t, samples, seed, stream).front();
}

std::vector<MeanEstimate> monte_carlo_laplace(const QForm& q,
                                              std::span<const double> lambdas,
                                              std::uint64_t samples,
                                              std::uint64_t seed,
                                              std::uint64_t stream) {
  for (double l : lambdas)
    if (!(l >= 0.0)) throw DomainError("monte_carlo_laplace: negative lambda");
  // Welford accumulation per lambda of exp(-lambda (f - fmin)), with fmin the
  // running minimum, so tiny transforms keep a representable variance.
  std::vector<double> mean(lambdas.size(), 0.0);
  std::vector<double> m2(lambdas.size(), 0.0);
  double fmin = std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;
  draw_values(q, samples, seed, stream, [&](double f) {
    if (f < fmin) {
      if (count > 0) {
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
          const double g = std::exp(-lambdas[j] * (fmin - f));
          mean[j] *= g;
          m2[j] *= g * g;
        }
      }
      fmin = f;
    }
    ++count;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      const double y = std::exp(-lambdas[j] * (f - fmin));
      const double d = y - mean[j];
      mean[j] += d / static_cast<double>(count);
      m2[j] += d * (y - mean[j]);
    }
  });
  std::vector<MeanEstimate> out;
  out.reserve(lambdas.size());
  const double n = static_cast<double>(samples);
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    const double scale = std::exp(-lambdas[j] * fmin);
    out.push_back({scale * mean[j], scale * std::sqrt(m2[j] / (n - 1.0) / n)});
  }
  return out;
}

ProbEstimate prob_below(const QForm& q, double threshold, const ProbOptions& opts) {
  if (opts.method == Method::montecarlo)
    return monte_carlo(q, threshold, opts.samples, opts.seed, opts.stream);
  const SpectralForm s = reduce(q);
  if (s.terms.empty()) {
    const double p = s.c <= threshold ? 1.0 : 0.0;
    return {p, p, p, Method::inversion};
  }
  return cdf_inversion(s, threshold, opts.tol);
}

ProbEstimate small_ball_prob(const QForm& q, Epsilon eps, const ProbOptions& opts) {
  const double mean = expectation(q);
  if (!(mean > 0.0))
    throw DegenerateInstance("small_ball_prob: E f = 0 (f identically zero)");
  return prob_below(q, eps.value() * mean, opts);
}

}  // namespace anticonc
