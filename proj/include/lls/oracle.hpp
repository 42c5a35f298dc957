#pragma once

// Brute-force reference computations, deliberately independent of the
// closed-form formulas they check:
//  - the scaled Jacobian of L^T x(A, b) by central differences over every
//    entry of A and b, whose largest singular value is kappa_{g,F};
//  - Monte Carlo sampling of the linear statistical model.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lls/conditioning.hpp"
#include "lls/solver.hpp"

namespace lls {

/// Largest problem (m n + m unknowns in the data space) the Jacobian oracle
/// will accept.
inline constexpr std::size_t kMaxOracleDataSize = 2000;

struct JacobianOracleResult {
  double sigma_max = 0.0;
  std::size_t jacobian_rows = 0;
  std::size_t jacobian_cols = 0;
  /// Relative step factor; entry (A or b) value v is perturbed by fd_step (1 + |v|).
  double fd_step = 0.0;
  /// sigma_max recomputed with twice the step.
  double sigma_max_doubled_step = 0.0;
  Matrix l_mat_used;
};

/// kappa_{g,F}(A, b) for g = L^T x as the largest singular value of the
/// explicit scaled Jacobian (A-block scaled by 1/alpha, b-block by 1/beta).
/// Throws ScaleExceeded above kMaxOracleDataSize and FdStepUnstable when
/// doubling the step moves the result by more than 1e-2 relative.
JacobianOracleResult jacobian_kappa(const Matrix& a, std::span<const double> b, const Matrix& l_mat, NormWeights w);

/// Estimates for `replicates` simulated right-hand sides; row r uses seed + r.
/// Rows are computed on up to worker_count() threads and do not depend on it.
Matrix replicate_estimates(const StatisticalModel& model, std::size_t replicates, std::uint64_t seed);

/// Sample standard deviation of x_i over the replicates.
double monte_carlo_component_std(const StatisticalModel& model, std::size_t i, std::size_t replicates,
                                 std::uint64_t seed);

/// Sample standard deviation of l^T x for each supplied direction.
Vector functional_std(const StatisticalModel& model, std::span<const Vector> ells, std::size_t replicates,
                      std::uint64_t seed);

/// Dominant eigenvector (unit norm) of (A^T A)^{-1} by power iteration.
Vector dominant_covariance_direction(const Matrix& a);

/// max over unit l of the sample std of l^T x. The candidate set is the
/// dominant covariance direction plus directions - 1 seeded random unit
/// vectors.
double max_functional_std(const StatisticalModel& model, std::size_t replicates, std::size_t directions,
                          std::uint64_t seed);

/// Worker threads for Monte Carlo: LLS_SENSE_THREADS if set, else hardware
/// concurrency.
std::size_t worker_count();

}  // namespace lls
