#pragma once

// Dense row-major matrices, Householder QR, Cholesky, triangular kernels and
// the Hager/Higham estimator for norms of triangular inverses.

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "lls/error.hpp"

namespace lls {

using Vector = std::vector<double>;

inline constexpr double kUlp = std::numeric_limits<double>::epsilon();

class Matrix {
 public:
  /// Zero-filled rows x cols matrix. Both dimensions must be at least one.
  Matrix(std::size_t rows, std::size_t cols);
  /// Takes row-major data; rejects size mismatches and non-finite entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  /// n x 1 matrix holding v.
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector col(std::size_t j) const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// a * x
Vector multiply(const Matrix& a, std::span<const double> x);
/// a^T * x
Vector multiply_transposed(const Matrix& a, std::span<const double> x);
/// a^T * a
Matrix gram(const Matrix& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
/// Largest absolute column sum.
double norm_one(const Matrix& a);
/// Largest absolute row sum.
double norm_inf(const Matrix& a);

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
Vector singular_values(const Matrix& a);
double spectral_norm(const Matrix& a);

enum class FactorSource { qr_of_a, cholesky_of_normal_equations };
enum class TriSolveMode { transposed, plain };
enum class NormKind { one, infinity };

/// Upper triangular factor R with positive diagonal, optionally carrying the
/// Householder reflectors that produced it. Immutable once built.
class QrFactors {
 public:
  /// Wraps an existing upper triangular matrix (no orthogonal factor). The
  /// strict lower triangle must be zero and the diagonal positive.
  static QrFactors from_triangular(Matrix r,
                                   FactorSource source = FactorSource::cholesky_of_normal_equations);

  const Matrix& r() const noexcept { return r_; }
  std::size_t n() const noexcept { return r_.cols(); }
  /// Row count of the factored matrix (n for a Cholesky factor).
  std::size_t m() const noexcept { return m_; }
  FactorSource source() const noexcept { return source_; }
  bool has_reflectors() const noexcept { return !tau_.empty(); }

  /// Q^T b for length-m b. Requires reflectors.
  Vector apply_qt(std::span<const double> b) const;
  /// Q y for length-m y. Requires reflectors.
  Vector apply_q(std::span<const double> y) const;
  /// Thin m x n orthonormal factor.
  Matrix form_q() const;

 private:
  friend QrFactors householder_qr(const Matrix& a);
  friend QrFactors cholesky_upper(const Matrix& n_mat);

  QrFactors(Matrix r, FactorSource source, std::size_t m) : r_(std::move(r)), source_(source), m_(m) {}

  Matrix r_;
  FactorSource source_;
  std::size_t m_;
  // Essential parts of the reflectors, column k holds v_k below the diagonal
  // (v_k(k) = 1 is implicit).
  std::vector<double> reflectors_;
  Vector tau_;
  // +1/-1 row flips applied to reach the positive-diagonal convention.
  Vector signs_;
};

/// Householder QR of a (rows >= cols). Throws RankDeficient when some
/// |R_ii| <= cols * ulp * max_j |R_jj|.
QrFactors householder_qr(const Matrix& a);

/// Upper Cholesky factor U with U^T U = n_mat. Throws NotPositiveDefinite on a
/// non-positive pivot and InvalidArgument on an asymmetric input.
QrFactors cholesky_upper(const Matrix& n_mat);

/// Solves R^T y = rhs (transposed) or R z = rhs (plain).
Vector tri_solve(const QrFactors& r, std::span<const double> rhs, TriSolveMode mode);

/// Explicit upper triangular R^{-1}. Column j is bitwise identical to
/// tri_solve(r, e_j, plain).
Matrix tri_invert(const QrFactors& r);

/// Lower-bound estimate of ||R^{-1}||_1 or ||R^{-1}||_inf by Hager's method
/// with Higham's refinements, using only triangular solves.
double inv_norm_estimate(const QrFactors& r, NormKind which);

/// sigma_min(a) through one-sided Jacobi on the R factor of a.
double smallest_singular_value(const Matrix& a);
double smallest_singular_value(const QrFactors& r);

}  // namespace lls
