#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace anticonc {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Dense symmetric matrix held as its packed upper triangle, so symmetry
/// holds by construction. Dimension zero is allowed and stands for the empty
/// Q22 block of a constant polynomial.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(std::size_t n);

  static SymMat identity(std::size_t n);
  static SymMat diagonal(std::span<const double> d);
  /// Builds from a row-major n x n array. Entries whose mirror differs by
  /// more than `asym_tol * max(1, |a_ij|, |a_ji|)` are rejected with
  /// InputError; smaller asymmetry is averaged away.
  static SymMat from_row_major(std::size_t n, std::span<const double> rows,
                               double asym_tol = 0.0);
  /// Gram matrix A^T A of a row-major rows x cols matrix A.
  static SymMat gram(std::size_t rows, std::size_t cols,
                     std::span<const double> a);

  std::size_t dim() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[index(i, j)];
  }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    data_[index(i, j)] = v;
  }
  void add(std::size_t i, std::size_t j, double v) noexcept {
    data_[index(i, j)] += v;
  }

  double trace() const noexcept;
  double max_abs() const noexcept;
  double frobenius() const noexcept;
  bool all_finite() const noexcept;

  Vector multiply(std::span<const double> x) const;
  /// x^T M x
  double quadratic(std::span<const double> x) const;
  SymMat shifted(double ridge) const;
  SymMat scaled(double factor) const;
  /// Full row-major copy.
  std::vector<double> dense() const;

  friend bool operator==(const SymMat&, const SymMat&) = default;

 private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept {
    if (i > j) {
      const std::size_t t = i;
      i = j;
      j = t;
    }
    return j * (j + 1) / 2 + i;
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Row-major dense matrix, used for eigenvector bases.
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  Vector column(std::size_t j) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenDecomp {
  /// Sorted descending; ties keep the original diagonal order.
  Vector eigenvalues;
  /// Column j is the unit eigenvector of eigenvalues[j].
  DenseMat basis;
};

/// Cyclic Jacobi eigensolver. Stops when the off-diagonal Frobenius norm
/// drops to 1e-14 * ||M||_F or after 100 sweeps. Throws InputError on
/// non-finite entries.
EigenDecomp sym_eigen(const SymMat& m);

struct PsdCertificate {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

inline constexpr double kDefaultPsdTol = 1e-10;

/// PSD iff min eigenvalue >= -tol * (1 + max |eigenvalue|).
PsdCertificate is_psd(const SymMat& m, double tol = kDefaultPsdTol);

/// Cholesky solve of M x = b. Throws NotPositiveDefinite on a non-positive
/// pivot.
Vector solve_spd(const SymMat& m, std::span<const double> b);

enum class SchurBlock {
  /// q11 - q12^T (Q22 + ridge I)^{-1} q12, the exponent of the Laplace
  /// transform with ridge = 1/(2 lambda).
  lower,
  /// min eigenvalue of Q22 - q12 q12^T / (q11 + ridge), the completed-square
  /// remainder with ridge = gamma.
  corner,
};

double schur_value(double q11, std::span<const double> q12, const SymMat& q22,
                   double ridge, SchurBlock on);

}  // namespace anticonc
