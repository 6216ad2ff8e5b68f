#include "anticonc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "anticonc/error.hpp"

namespace anticonc {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SymMat::SymMat(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

SymMat SymMat::identity(std::size_t n) {
  SymMat m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMat SymMat::diagonal(std::span<const double> d) {
  SymMat m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMat SymMat::from_row_major(std::size_t n, std::span<const double> rows,
                              double asym_tol) {
  if (rows.size() != n * n) throw InputError("matrix: expected n*n entries");
  SymMat m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double a = rows[i * n + j];
      const double b = rows[j * n + i];
      if (!std::isfinite(a) || !std::isfinite(b))
        throw InputError("matrix: non-finite entry");
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      if (std::abs(a - b) > asym_tol * scale)
        throw InputError("matrix: not symmetric at (" + std::to_string(i) +
                         "," + std::to_string(j) + ")");
      m.set(i, j, a == b ? a : 0.5 * (a + b));
    }
  }
  return m;
}

SymMat SymMat::gram(std::size_t rows, std::size_t cols,
                    std::span<const double> a) {
  if (a.size() != rows * cols) throw InputError("gram: size mismatch");
  SymMat m(cols);
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = i; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + i] * a[r * cols + j];
      m.set(i, j, s);
    }
  }
  return m;
}

double SymMat::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double SymMat::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double SymMat::frobenius() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      s += v * v;
    }
  }
  return std::sqrt(s);
}

bool SymMat::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Vector SymMat::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw InputError("multiply: dimension mismatch");
  Vector y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double SymMat::quadratic(std::span<const double> x) const {
  if (x.size() != n_) throw InputError("quadratic: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.5 * (*this)(i, i) * x[i];
    for (std::size_t j = i + 1; j < n_; ++j) row += (*this)(i, j) * x[j];
    s += 2.0 * row * x[i];
  }
  return s;
}

SymMat SymMat::shifted(double ridge) const {
  SymMat m = *this;
  for (std::size_t i = 0; i < n_; ++i) m.add(i, i, ridge);
  return m;
}

SymMat SymMat::scaled(double factor) const {
  SymMat m = *this;
  for (double& v : m.data_) v *= factor;
  return m;
}

std::vector<double> SymMat::dense() const {
  std::vector<double> out(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = (*this)(i, j);
  return out;
}

Vector DenseMat::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffTolerance = 1e-14;

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a[i * n + j] * a[i * n + j];
  return std::sqrt(s);
}

}  // namespace

EigenDecomp sym_eigen(const SymMat& m) {
  if (!m.all_finite()) throw InputError("sym_eigen: non-finite entries");
  const std::size_t n = m.dim();
  std::vector<double> a = m.dense();
  DenseMat v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double target = kOffTolerance * m.frobenius();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a, n) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        // Rotation would not change either diagonal entry in floating point.
        const double eps = std::numeric_limits<double>::epsilon();
        if (std::abs(apq) < 0.25 * eps * std::abs(app) &&
            std::abs(apq) < 0.25 * eps * std::abs(aqq)) {
          a[p * n + q] = a[q * n + p] = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * n + i] > a[j * n + j];
  });

  EigenDecomp out;
  out.eigenvalues.resize(n);
  out.basis = DenseMat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a[order[j] * n + order[j]];
    for (std::size_t i = 0; i < n; ++i) out.basis(i, j) = v(i, order[j]);
  }
  return out;
}

PsdCertificate is_psd(const SymMat& m, double tol) {
  if (tol < 0.0) throw DomainError("is_psd: negative tolerance");
  if (m.dim() == 0) return {true, 0.0};
  const EigenDecomp e = sym_eigen(m);
  const double min_ev = e.eigenvalues.back();
  double max_abs = 0.0;
  for (double ev : e.eigenvalues) max_abs = std::max(max_abs, std::abs(ev));
  return {min_ev >= -tol * (1.0 + max_abs), min_ev};
}

Vector solve_spd(const SymMat& m, std::span<const double> b) {
  const std::size_t n = m.dim();
  if (b.size() != n) throw InputError("solve_spd: dimension mismatch");
  // Lower-triangular factor, row-major.
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0) || !std::isfinite(d))
      throw NotPositiveDefinite("solve_spd: matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l[i * n + k] * y[k];
    y[i] /= l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l[k * n + i] * y[k];
    y[i] /= l[i * n + i];
  }
  return y;
}

double schur_value(double q11, std::span<const double> q12, const SymMat& q22,
                   double ridge, SchurBlock on) {
  if (!(ridge > 0.0)) throw DomainError("schur_value: ridge must be positive");
  if (q12.size() != q22.dim()) throw InputError("schur_value: dimension mismatch");

  if (on == SchurBlock::lower) {
    const Vector z = solve_spd(q22.shifted(ridge), q12);
    return q11 - dot(q12, z);
  }

  const double pivot = q11 + ridge;
  if (!(pivot > 0.0))
    throw NotPositiveDefinite("schur_value: q11 + ridge is not positive");
  if (q22.dim() == 0) return 0.0;
  SymMat rest = q22;
  for (std::size_t i = 0; i < q22.dim(); ++i)
    for (std::size_t j = i; j < q22.dim(); ++j)
      rest.add(i, j, -q12[i] * q12[j] / pivot);
  return sym_eigen(rest).eigenvalues.back();
}

}  // namespace anticonc
