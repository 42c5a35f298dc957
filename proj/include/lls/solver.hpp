#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "lls/dense.hpp"

namespace lls {

enum class MseSource { estimated, supplied };

struct SolveOptions {
  /// Known noise variance sigma_b^2. Required when m == n.
  std::optional<double> sigma_sq;
};

struct NormalEquationsOptions {
  std::optional<double> sigma_sq;
  /// ||b||, which cannot be recovered from A^T A and A^T b.
  std::optional<double> b_norm;
};

/// Least squares estimate together with everything the diagnostics consume.
struct LlsSolution {
  Vector x;
  double residual_norm = 0.0;
  std::size_t m = 0;
  std::size_t n = 0;
  double mse = 0.0;
  MseSource mse_source = MseSource::estimated;
  QrFactors factors;
  /// Absent in normal-equations mode unless supplied.
  std::optional<double> b_norm;
  double x_norm = 0.0;
  /// ||A||_F; in normal-equations mode sqrt(trace(A^T A)).
  std::optional<double> a_fro;
};

/// min ||A x - b||_2 by Householder QR.
LlsSolution solve_qr(const Matrix& a, std::span<const double> b, const SolveOptions& options = {});

/// Same as solve_qr but reuses an existing QR factorization of A.
LlsSolution solve_with_factors(const QrFactors& factors, std::span<const double> b,
                               const SolveOptions& options = {});

/// x = (A^T A)^{-1} A^T b from the pre-formed normal equations via Cholesky.
LlsSolution solve_normal_equations(const Matrix& n_mat, std::span<const double> rhs, std::size_t m,
                                   double residual_norm_sq, const NormalEquationsOptions& options = {});

/// b = A x + eps with eps ~ N(0, sigma_b^2 I).
struct StatisticalModel {
  Matrix a;
  Vector x_true;
  double sigma_b = 0.0;
};

/// One realisation of the model; identical seeds give identical vectors.
Vector simulate_observations(const StatisticalModel& model, std::uint64_t seed);

}  // namespace lls
