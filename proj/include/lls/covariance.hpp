#pragma once

// Variance-covariance quantities of the least squares estimate,
// C = sigma_b^2 (A^T A)^{-1} = sigma_b^2 R^{-1} R^{-T}.
//
// Every function takes an optional sigma_b^2 override; without it the
// solution's mse is used.

#include <cstddef>
#include <optional>
#include <span>

#include "lls/solver.hpp"

namespace lls {

struct CovColumn {
  std::size_t index = 0;
  Vector values;
  double sigma_sq_used = 0.0;
};

struct CovDiagonal {
  Vector values;
  double sigma_sq_used = 0.0;
};

struct CovFull {
  Matrix values;
  double sigma_sq_used = 0.0;
};

struct CovTrace {
  double value = 0.0;
  double sigma_sq_used = 0.0;
};

/// C e_i from R^T y = e_i, R z = y. Never forms an inverse.
CovColumn cov_column(const LlsSolution& sol, std::size_t i, std::optional<double> sigma_sq = std::nullopt);

/// c_ii = sigma^2 ||row i of R^{-1}||^2 for all i.
CovDiagonal cov_diagonal(const LlsSolution& sol, std::optional<double> sigma_sq = std::nullopt);

/// Full symmetric C; upper triangle from R^{-1} R^{-T}, mirrored.
CovFull cov_full(const LlsSolution& sol, std::optional<double> sigma_sq = std::nullopt);

/// trace(C), summed from the diagonal.
CovTrace cov_trace(const LlsSolution& sol, std::optional<double> sigma_sq = std::nullopt);

/// variance(l^T x) = l^T C l = sigma^2 ||R^{-T} l||^2.
double functional_variance(const LlsSolution& sol, std::span<const double> ell,
                           std::optional<double> sigma_sq = std::nullopt);

}  // namespace lls
