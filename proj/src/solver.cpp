#include "lls/solver.hpp"

#include <cmath>
#include <string>

#include "lls/random.hpp"

namespace lls {

namespace {

double resolve_mse(std::size_t m, std::size_t n, double residual_norm_sq, const std::optional<double>& sigma_sq,
                   MseSource& source) {
  if (sigma_sq) {
    if (!(*sigma_sq >= 0.0) || !std::isfinite(*sigma_sq)) {
      throw Error(ErrorKind::InvalidArgument, "sigma^2 must be finite and non-negative");
    }
    source = MseSource::supplied;
    return *sigma_sq;
  }
  if (m <= n) throw Error(ErrorKind::DegenerateMse, "m == n: supply sigma^2 explicitly");
  source = MseSource::estimated;
  return residual_norm_sq / static_cast<double>(m - n);
}

}  // namespace

LlsSolution solve_with_factors(const QrFactors& factors, std::span<const double> b, const SolveOptions& options) {
  const std::size_t m = factors.m();
  const std::size_t n = factors.n();
  if (b.size() != m) throw Error(ErrorKind::DimensionMismatch, "rhs length differs from matrix rows");
  for (double v : b) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite rhs entry");
  }

  const Vector qtb = factors.apply_qt(b);
  Vector x = tri_solve(factors, std::span<const double>(qtb.data(), n), TriSolveMode::plain);
  const double residual_norm = norm2(std::span<const double>(qtb.data() + n, m - n));

  MseSource source = MseSource::estimated;
  const double mse = resolve_mse(m, n, residual_norm * residual_norm, options.sigma_sq, source);
  const double x_norm = norm2(x);
  return LlsSolution{.x = std::move(x),
                     .residual_norm = residual_norm,
                     .m = m,
                     .n = n,
                     .mse = mse,
                     .mse_source = source,
                     .factors = factors,
                     .b_norm = norm2(b),
                     .x_norm = x_norm,
                     .a_fro = std::nullopt};
}

LlsSolution solve_qr(const Matrix& a, std::span<const double> b, const SolveOptions& options) {
  if (a.rows() != b.size()) throw Error(ErrorKind::DimensionMismatch, "rhs length differs from matrix rows");
  if (a.rows() < a.cols()) throw Error(ErrorKind::DimensionMismatch, "system is underdetermined");
  LlsSolution sol = solve_with_factors(householder_qr(a), b, options);
  sol.a_fro = frobenius_norm(a);
  return sol;
}

LlsSolution solve_normal_equations(const Matrix& n_mat, std::span<const double> rhs, std::size_t m,
                                   double residual_norm_sq, const NormalEquationsOptions& options) {
  const std::size_t n = n_mat.rows();
  if (n_mat.cols() != n || rhs.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "normal equations: expected n x n matrix and length-n rhs");
  }
  if (m < n) throw Error(ErrorKind::DimensionMismatch, "observation count m is below n");
  if (!(residual_norm_sq >= 0.0) || !std::isfinite(residual_norm_sq)) {
    throw Error(ErrorKind::InvalidArgument, "residual norm^2 must be finite and non-negative");
  }

  QrFactors u = cholesky_upper(n_mat);
  const Vector y = tri_solve(u, rhs, TriSolveMode::transposed);
  Vector x = tri_solve(u, y, TriSolveMode::plain);

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += n_mat(i, i);

  MseSource source = MseSource::estimated;
  const double mse = resolve_mse(m, n, residual_norm_sq, options.sigma_sq, source);
  const double x_norm = norm2(x);
  return LlsSolution{.x = std::move(x),
                     .residual_norm = std::sqrt(residual_norm_sq),
                     .m = m,
                     .n = n,
                     .mse = mse,
                     .mse_source = source,
                     .factors = std::move(u),
                     .b_norm = options.b_norm,
                     .x_norm = x_norm,
                     .a_fro = std::sqrt(trace)};
}

Vector simulate_observations(const StatisticalModel& model, std::uint64_t seed) {
  if (model.x_true.size() != model.a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "x_true length differs from matrix columns");
  }
  if (!(model.sigma_b >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_b must be non-negative");
  Vector b = multiply(model.a, model.x_true);
  SplitMix64 rng(seed);
  for (double& v : b) v += model.sigma_b * rng.normal();
  return b;
}

}  // namespace lls
