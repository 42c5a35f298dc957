#include "lls/covariance.hpp"

#include <cmath>
#include <string>

namespace lls {

namespace {

double sigma_sq_for(const LlsSolution& sol, std::optional<double> sigma_sq) {
  if (!sigma_sq) return sol.mse;
  if (!(*sigma_sq >= 0.0) || !std::isfinite(*sigma_sq)) {
    throw Error(ErrorKind::InvalidArgument, "sigma^2 override must be finite and non-negative");
  }
  return *sigma_sq;
}

}  // namespace

CovColumn cov_column(const LlsSolution& sol, std::size_t i, std::optional<double> sigma_sq) {
  const std::size_t n = sol.n;
  if (i >= n) throw Error(ErrorKind::IndexOutOfRange, "column " + std::to_string(i) + " of " + std::to_string(n));
  const double s2 = sigma_sq_for(sol, sigma_sq);
  Vector e(n, 0.0);
  e[i] = 1.0;
  const Vector y = tri_solve(sol.factors, e, TriSolveMode::transposed);
  Vector z = tri_solve(sol.factors, y, TriSolveMode::plain);
  for (double& v : z) v *= s2;
  return {i, std::move(z), s2};
}

CovDiagonal cov_diagonal(const LlsSolution& sol, std::optional<double> sigma_sq) {
  const double s2 = sigma_sq_for(sol, sigma_sq);
  const Matrix inv = tri_invert(sol.factors);
  Vector diag(sol.n);
  for (std::size_t i = 0; i < sol.n; ++i) {
    const auto row = inv.row(i).subspan(i);
    const double nrm = norm2(row);
    diag[i] = s2 * nrm * nrm;
  }
  return {std::move(diag), s2};
}

CovFull cov_full(const LlsSolution& sol, std::optional<double> sigma_sq) {
  const double s2 = sigma_sq_for(sol, sigma_sq);
  const std::size_t n = sol.n;
  const Matrix inv = tri_invert(sol.factors);
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = j; k < n; ++k) s += inv(i, k) * inv(j, k);
      c(i, j) = s2 * s;
      c(j, i) = c(i, j);
    }
  }
  return {std::move(c), s2};
}

CovTrace cov_trace(const LlsSolution& sol, std::optional<double> sigma_sq) {
  const CovDiagonal d = cov_diagonal(sol, sigma_sq);
  double t = 0.0;
  for (double v : d.values) t += v;
  return {t, d.sigma_sq_used};
}

double functional_variance(const LlsSolution& sol, std::span<const double> ell, std::optional<double> sigma_sq) {
  if (ell.size() != sol.n) throw Error(ErrorKind::DimensionMismatch, "functional length differs from n");
  const double s2 = sigma_sq_for(sol, sigma_sq);
  const Vector y = tri_solve(sol.factors, ell, TriSolveMode::transposed);
  const double nrm = norm2(y);
  return s2 * nrm * nrm;
}

}  // namespace lls
