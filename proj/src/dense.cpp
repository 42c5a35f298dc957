#include "lls/dense.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace lls {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(op) + ": shapes differ");
  }
}

// Two-norm with scaling so intermediate squares cannot overflow.
double scaled_norm(std::span<const double> x) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : x) {
    const double t = v / scale;
    sum += t * t;
  }
  return scale * std::sqrt(sum);
}

// Back substitution for R z = rhs, touching rows 0..last only. Entries past
// `last` are taken as zero in rhs and returned as zero.
void back_substitute(const Matrix& r, std::span<double> z, std::size_t last) {
  for (std::size_t ii = last + 1; ii-- > 0;) {
    double s = z[ii];
    const auto row = r.row(ii);
    for (std::size_t k = ii + 1; k <= last; ++k) s -= row[k] * z[k];
    z[ii] = s / row[ii];
  }
}

void forward_substitute_transposed(const Matrix& r, std::span<double> y) {
  const std::size_t n = r.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= r(k, i) * y[k];
    y[i] = s / r(i, i);
  }
}

void check_rank(const Matrix& r) {
  const std::size_t n = r.cols();
  double biggest = 0.0;
  for (std::size_t j = 0; j < n; ++j) biggest = std::max(biggest, std::abs(r(j, j)));
  const double tol = static_cast<double>(n) * kUlp * biggest;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(r(i, i)) > tol)) {
      throw Error(ErrorKind::RankDeficient,
                  "|R(" + std::to_string(i) + "," + std::to_string(i) + ")| below rank tolerance");
    }
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw Error(ErrorKind::InvalidArgument, "matrix dimensions must be >= 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (rows == 0 || cols == 0) throw Error(ErrorKind::InvalidArgument, "matrix dimensions must be >= 1");
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::DimensionMismatch, "data length " + std::to_string(data_.size()) + " != " +
                                                  std::to_string(rows) + "x" + std::to_string(cols));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite matrix entry");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(ErrorKind::DimensionMismatch, "ragged row list");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::column(std::span<const double> v) {
  return Matrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Vector Matrix::col(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix sum");
  Matrix c = a;
  auto cd = c.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix difference");
  Matrix c = a;
  auto cd = c.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data()) v *= s;
  return c;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "A*x: length mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw Error(ErrorKind::DimensionMismatch, "A^T*x: length mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += row[j] * x[i];
  }
  return y;
}

Matrix gram(const Matrix& a) {
  Matrix g(a.cols(), a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = i; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return scaled_norm(x); }

double frobenius_norm(const Matrix& a) { return scaled_norm(a.data()); }

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double norm_one(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

Vector singular_values(const Matrix& a) {
  // Orthogonalise the columns of the taller orientation; the column norms of
  // the converged matrix are the singular values.
  const bool wide = a.rows() < a.cols();
  const std::size_t len = wide ? a.cols() : a.rows();
  const std::size_t ncol = wide ? a.rows() : a.cols();
  std::vector<Vector> cols(ncol, Vector(len));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (wide) {
        cols[i][j] = a(i, j);
      } else {
        cols[j][i] = a(i, j);
      }
    }

  const double tol = std::sqrt(static_cast<double>(len)) * kUlp;
  constexpr int kMaxSweeps = 30;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < ncol; ++p) {
      for (std::size_t q = p + 1; q < ncol; ++q) {
        Vector& cp = cols[p];
        Vector& cq = cols[q];
        const double alpha = dot(cp, cp);
        const double beta = dot(cq, cq);
        const double gamma = dot(cp, cq);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < len; ++k) {
          const double x = cp[k];
          const double y = cq[k];
          cp[k] = c * x - s * y;
          cq[k] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sv(ncol);
  for (std::size_t j = 0; j < ncol; ++j) sv[j] = scaled_norm(cols[j]);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double spectral_norm(const Matrix& a) { return singular_values(a).front(); }

QrFactors QrFactors::from_triangular(Matrix r, FactorSource source) {
  if (r.rows() != r.cols()) throw Error(ErrorKind::DimensionMismatch, "triangular factor must be square");
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (r(i, j) != 0.0) throw Error(ErrorKind::InvalidArgument, "factor is not upper triangular");
    }
    if (!(r(i, i) > 0.0)) throw Error(ErrorKind::InvalidArgument, "factor diagonal must be positive");
  }
  const std::size_t n = r.rows();
  return QrFactors(std::move(r), source, n);
}

Vector QrFactors::apply_qt(std::span<const double> b) const {
  if (!has_reflectors()) throw Error(ErrorKind::MissingData, "factor carries no orthogonal part");
  if (b.size() != m_) throw Error(ErrorKind::DimensionMismatch, "Q^T b: length mismatch");
  const std::size_t n = r_.cols();
  Vector y(b.begin(), b.end());
  for (std::size_t k = 0; k < n; ++k) {
    double s = y[k];
    for (std::size_t i = k + 1; i < m_; ++i) s += reflectors_[i * n + k] * y[i];
    s *= tau_[k];
    y[k] -= s;
    for (std::size_t i = k + 1; i < m_; ++i) y[i] -= s * reflectors_[i * n + k];
  }
  for (std::size_t k = 0; k < n; ++k) y[k] *= signs_[k];
  return y;
}

Vector QrFactors::apply_q(std::span<const double> in) const {
  if (!has_reflectors()) throw Error(ErrorKind::MissingData, "factor carries no orthogonal part");
  if (in.size() != m_) throw Error(ErrorKind::DimensionMismatch, "Q y: length mismatch");
  const std::size_t n = r_.cols();
  Vector y(in.begin(), in.end());
  for (std::size_t k = 0; k < n; ++k) y[k] *= signs_[k];
  for (std::size_t kk = n; kk-- > 0;) {
    double s = y[kk];
    for (std::size_t i = kk + 1; i < m_; ++i) s += reflectors_[i * n + kk] * y[i];
    s *= tau_[kk];
    y[kk] -= s;
    for (std::size_t i = kk + 1; i < m_; ++i) y[i] -= s * reflectors_[i * n + kk];
  }
  return y;
}

Matrix QrFactors::form_q() const {
  const std::size_t n = r_.cols();
  Matrix q(m_, n);
  Vector e(m_, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = apply_q(e);
    for (std::size_t i = 0; i < m_; ++i) q(i, j) = col[i];
  }
  return q;
}

QrFactors householder_qr(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw Error(ErrorKind::DimensionMismatch, "QR needs rows >= cols");

  std::vector<double> w(a.data().begin(), a.data().end());
  auto at = [&](std::size_t i, std::size_t j) -> double& { return w[i * n + j]; };
  Vector tau(n, 0.0);
  Vector col(m);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t len = m - k;
    for (std::size_t i = k; i < m; ++i) col[i - k] = at(i, k);
    const double xnorm = scaled_norm(std::span<const double>(col.data() + 1, len - 1));
    const double alpha = at(k, k);
    if (xnorm == 0.0) {
      // Column already reduced; H = I.
      tau[k] = 0.0;
      continue;
    }
    const double beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
    tau[k] = (beta - alpha) / beta;
    const double scale = 1.0 / (alpha - beta);
    for (std::size_t i = k + 1; i < m; ++i) at(i, k) *= scale;
    at(k, k) = beta;

    for (std::size_t j = k + 1; j < n; ++j) {
      double s = at(k, j);
      for (std::size_t i = k + 1; i < m; ++i) s += at(i, k) * at(i, j);
      s *= tau[k];
      at(k, j) -= s;
      for (std::size_t i = k + 1; i < m; ++i) at(i, j) -= s * at(i, k);
    }
  }

  Matrix r(n, n);
  Vector signs(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (at(i, i) < 0.0) signs[i] = -1.0;
    for (std::size_t j = i; j < n; ++j) r(i, j) = signs[i] * at(i, j);
  }
  check_rank(r);

  std::vector<double> reflectors(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < std::min(i, n); ++j) reflectors[i * n + j] = at(i, j);

  QrFactors f(std::move(r), FactorSource::qr_of_a, m);
  f.reflectors_ = std::move(reflectors);
  f.tau_ = std::move(tau);
  f.signs_ = std::move(signs);
  return f;
}

QrFactors cholesky_upper(const Matrix& n_mat) {
  const std::size_t n = n_mat.rows();
  if (n_mat.cols() != n) throw Error(ErrorKind::DimensionMismatch, "normal matrix must be square");
  const double big = max_abs(n_mat);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(n_mat(i, j) - n_mat(j, i)) > 1e-12 * big) {
        throw Error(ErrorKind::InvalidArgument, "normal matrix is not symmetric");
      }
    }

  Matrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = n_mat(i, i);
    for (std::size_t k = 0; k < i; ++k) d -= u(k, i) * u(k, i);
    if (!(d > 0.0)) {
      throw Error(ErrorKind::NotPositiveDefinite, "pivot " + std::to_string(i) + " is not positive");
    }
    const double uii = std::sqrt(d);
    u(i, i) = uii;
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = n_mat(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= u(k, i) * u(k, j);
      u(i, j) = s / uii;
    }
  }
  return QrFactors(std::move(u), FactorSource::cholesky_of_normal_equations, n);
}

Vector tri_solve(const QrFactors& r, std::span<const double> rhs, TriSolveMode mode) {
  const std::size_t n = r.n();
  if (rhs.size() != n) throw Error(ErrorKind::DimensionMismatch, "triangular solve: length mismatch");
  Vector out(rhs.begin(), rhs.end());
  if (mode == TriSolveMode::plain) {
    back_substitute(r.r(), out, n - 1);
  } else {
    forward_substitute_transposed(r.r(), out);
  }
  return out;
}

Matrix tri_invert(const QrFactors& r) {
  const std::size_t n = r.n();
  Matrix inv(n, n);
  Vector z(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(z.begin(), z.end(), 0.0);
    z[j] = 1.0;
    back_substitute(r.r(), z, j);
    for (std::size_t i = 0; i <= j; ++i) inv(i, j) = z[i];
  }
  return inv;
}

double inv_norm_estimate(const QrFactors& r, NormKind which) {
  // Estimates ||B||_1 with B = R^{-1} (one) or B = R^{-T} (infinity), since
  // ||R^{-1}||_inf = ||R^{-T}||_1.
  const std::size_t n = r.n();
  const TriSolveMode fwd = which == NormKind::one ? TriSolveMode::plain : TriSolveMode::transposed;
  const TriSolveMode adj = which == NormKind::one ? TriSolveMode::transposed : TriSolveMode::plain;
  auto apply = [&](const Vector& v) { return tri_solve(r, v, fwd); };
  auto apply_adjoint = [&](const Vector& v) { return tri_solve(r, v, adj); };
  auto l1 = [](const Vector& v) {
    double s = 0.0;
    for (double t : v) s += std::abs(t);
    return s;
  };
  auto sign_of = [](const Vector& v) {
    Vector s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] >= 0.0 ? 1.0 : -1.0;
    return s;
  };
  auto argmax_abs = [](const Vector& v) {
    std::size_t j = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[j])) j = i;
    return j;
  };

  Vector x(n, 1.0 / static_cast<double>(n));
  Vector y = apply(x);
  double est = l1(y);
  if (n == 1) return est;

  Vector xi = sign_of(y);
  Vector z = apply_adjoint(xi);
  std::size_t j = argmax_abs(z);

  constexpr int kMaxIterations = 5;
  for (int iter = 2; iter <= kMaxIterations; ++iter) {
    std::fill(x.begin(), x.end(), 0.0);
    x[j] = 1.0;
    y = apply(x);
    const double previous = est;
    const double candidate = l1(y);
    if (candidate <= previous) break;
    est = candidate;
    const Vector new_xi = sign_of(y);
    if (new_xi == xi) break;
    xi = new_xi;
    z = apply_adjoint(xi);
    const std::size_t last = j;
    j = argmax_abs(z);
    if (std::abs(z[last]) == std::abs(z[j])) break;
  }

  // Alternating-sign safeguard vector.
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = 1.0 + static_cast<double>(i) / static_cast<double>(n - 1);
    x[i] = (i % 2 == 0) ? mag : -mag;
  }
  y = apply(x);
  const double alt = 2.0 * l1(y) / (3.0 * static_cast<double>(n));
  return std::max(est, alt);
}

double smallest_singular_value(const QrFactors& r) { return singular_values(r.r()).back(); }

double smallest_singular_value(const Matrix& a) { return smallest_singular_value(householder_qr(a)); }

}  // namespace lls
