#pragma once

// Reference values computed independently of the library: high-precision
// series, Boost quadrature and Boost distributions.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "anticonc/linalg.hpp"
#include "anticonc/polyform.hpp"

namespace oracle {

// (2/sqrt(pi)) sum (-1)^k x^(2k+1) / (k! (2k+1)) in long double.
inline double erf_maclaurin(double xd) {
  const long double x = xd;
  long double term = x;  // (-1)^k x^(2k+1) / k!
  long double sum = 0.0L;
  for (int k = 0; k < 400; ++k) {
    const long double add = term / (2 * k + 1);
    sum += add;
    if (std::fabs(add) < 1e-30L * std::fabs(sum) + 1e-40L) break;
    term *= -x * x / (k + 1);
  }
  return static_cast<double>(sum * 2.0L / std::sqrt(3.14159265358979323846264338327950288L));
}

inline double chi2_cdf(double dof, double t) {
  return boost::math::cdf(boost::math::chi_squared_distribution<double>(dof), t);
}

inline double ncchi2_cdf(double dof, double noncentrality, double t) {
  if (noncentrality == 0.0) return chi2_cdf(dof, t);
  return boost::math::cdf(
      boost::math::non_central_chi_squared_distribution<double>(dof, noncentrality), t);
}

inline double normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::sqrt(2.0)); }

// Adaptive Gauss-Kronrod integral of g over [a, b] (infinite ends allowed).
inline double integrate(const std::function<double(double)>& g, double a, double b,
                        double tol = 1e-14, unsigned max_depth = 15) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, max_depth, tol);
}

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Standard normal mass of [lo, hi] by quadrature of the density.
inline double normal_mass(double lo, double hi) {
  return integrate([](double x) { return phi(x); }, lo, hi);
}

// Determinant by Gaussian elimination with partial pivoting in long double.
inline long double determinant(std::vector<long double> a, std::size_t n) {
  long double det = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0L) return 0.0L;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det = -det;
    }
    det *= a[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double m = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= m * a[c * n + k];
    }
  }
  return det;
}

// A^T A / rows for a random Gaussian A with the given number of rows.
inline anticonc::SymMat random_gram(std::size_t rows, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> a(rows * n);
  for (double& v : a) v = normal(rng);
  return anticonc::SymMat::gram(rows, n, a);
}

inline anticonc::QForm random_psd_qform(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> rows(1, n + 1);
  return anticonc::QForm::from_assembled(random_gram(rows(rng), n + 1, rng));
}

inline anticonc::SymMat random_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  anticonc::SymMat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, normal(rng));
  return m;
}

// lower Cholesky factor of an n x n SPD matrix held row-major
inline std::vector<long double> cholesky(const std::vector<long double>& a, std::size_t n) {
  std::vector<long double> l(n * n, 0.0L);
  for (std::size_t j = 0; j < n; ++j) {
    long double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    l[j * n + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      long double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  return l;
}

// exp(log_scale) * mean estimates the target, with standard error
// exp(log_scale) * std_error.
struct ScaledMean {
  double log_scale = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
};

// E exp(-lambda f(x)) under x ~ N(0, I) by importance sampling from an equal
// mixture of N(0, I) and, for every lambda, the Gaussian proportional to
// exp(-lambda f(x)) phi(x). The weights are computed from f itself and stay
// bounded by (lambdas + 1) times the target, so the standard error is honest
// even when the mass sits far in the tail of N(0, I).
inline std::vector<ScaledMean> laplace_importance(const anticonc::QForm& q,
                                                  const std::vector<double>& lambdas,
                                                  std::uint64_t samples, std::mt19937_64& rng) {
  const std::size_t n = q.n;
  struct Component {
    double lambda = 0.0;
    std::vector<double> mu;
    std::vector<long double> chol;
    double half_logdet = 0.0;
  };
  std::vector<Component> comps;
  comps.push_back({0.0, std::vector<double>(n, 0.0), {}, 0.0});
  comps[0].chol.assign(n * n, 0.0L);
  for (std::size_t i = 0; i < n; ++i) comps[0].chol[i * n + i] = 1.0L;
  for (double lambda : lambdas) {
    std::vector<long double> p(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        p[i * n + j] = (i == j ? 1.0L : 0.0L) + 2.0L * lambda * q.q22(i, j);
    Component c{lambda, std::vector<double>(n), cholesky(p, n), 0.0};
    // P mu = -2 lambda q12
    std::vector<long double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      long double s = -2.0L * lambda * q.q12[i];
      for (std::size_t k = 0; k < i; ++k) s -= c.chol[i * n + k] * y[k];
      y[i] = s / c.chol[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
      long double s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= c.chol[k * n + i] * c.mu[k];
      c.mu[i] = static_cast<double>(s / c.chol[i * n + i]);
    }
    for (std::size_t i = 0; i < n; ++i) c.half_logdet += static_cast<double>(std::log(c.chol[i * n + i]));
    comps.push_back(std::move(c));
  }

  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> pick(0, comps.size() - 1);
  const std::size_t m = lambdas.size();
  std::vector<double> ref(m, -std::numeric_limits<double>::infinity());
  std::vector<double> mean(m, 0.0), m2(m, 0.0), logs(comps.size());
  std::vector<double> x(n), z(n), d(n);
  for (std::uint64_t count = 1; count <= samples; ++count) {
    const Component& c = comps[pick(rng)];
    for (double& v : z) v = normal(rng);
    // x = mu + L^{-T} z
    for (std::size_t i = n; i-- > 0;) {
      long double s = z[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= c.chol[k * n + i] * (x[k] - c.mu[k]);
      x[i] = c.mu[i] + static_cast<double>(s / c.chol[i * n + i]);
    }
    double xx = 0.0, lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xx += x[i] * x[i];
      lin += q.q12[i] * x[i];
      for (std::size_t j = 0; j < n; ++j) quad += x[i] * q.q22(i, j) * x[j];
    }
    const double f = q.q11 + 2.0 * lin + quad;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      double dd = 0.0, dq = 0.0;
      for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - comps[k].mu[i];
      for (std::size_t i = 0; i < n; ++i) {
        dd += d[i] * d[i];
        for (std::size_t j = 0; j < n; ++j) dq += d[i] * q.q22(i, j) * d[j];
      }
      logs[k] = -0.5 * (dd + 2.0 * comps[k].lambda * dq) + comps[k].half_logdet + 0.5 * xx;
      top = std::max(top, logs[k]);
    }
    double sum = 0.0;
    for (double a : logs) sum += std::exp(a - top);
    const double log_mix = top + std::log(sum / static_cast<double>(comps.size()));
    for (std::size_t j = 0; j < m; ++j) {
      const double lw = -lambdas[j] * f - log_mix;
      if (lw > ref[j]) {
        const double g = std::exp(ref[j] - lw);
        mean[j] *= g;
        m2[j] *= g * g;
        ref[j] = lw;
      }
      const double y = std::exp(lw - ref[j]);
      const double delta = y - mean[j];
      mean[j] += delta / static_cast<double>(count);
      m2[j] += delta * (y - mean[j]);
    }
  }
  std::vector<ScaledMean> out;
  const double s = static_cast<double>(samples);
  for (std::size_t j = 0; j < m; ++j)
    out.push_back({ref[j], mean[j], std::sqrt(m2[j] / (s - 1.0) / s)});
  return out;
}

}  // namespace oracle
