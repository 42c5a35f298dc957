#pragma once

// Frobenius-norm partial condition numbers of the least squares solution
// x(A, b) and of linear functionals L^T x(A, b), with data perturbations
// measured in the product norm sqrt(alpha^2 ||dA||^2 + beta^2 ||db||^2).
//
// All formulas work from the R factor: ||L^T A^+|| = ||R^{-T} L|| and
// ||L^T (A^T A)^{-1}|| = ||R^{-1} R^{-T} L||.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lls/covariance.hpp"
#include "lls/solver.hpp"

namespace lls {

/// Product-norm weights stored as 1/alpha^2 and 1/beta^2, so that alpha or
/// beta = +inf (a channel that is not perturbed) is simply zero.
class NormWeights {
 public:
  /// Unit weights, alpha = beta = 1.
  NormWeights() = default;

  /// alpha, beta > 0; either may be +inf but not both.
  static NormWeights from_alpha_beta(double alpha, double beta);
  static NormWeights from_inverse_squares(double inv_alpha_sq, double inv_beta_sq);
  /// alpha = +inf, beta = 1: only b perturbed.
  static NormWeights b_only() { return from_inverse_squares(0.0, 1.0); }
  /// alpha = 1, beta = +inf: only A perturbed.
  static NormWeights a_only() { return from_inverse_squares(1.0, 0.0); }

  double inv_alpha_sq() const noexcept { return inv_alpha_sq_; }
  double inv_beta_sq() const noexcept { return inv_beta_sq_; }
  /// +inf when A is not perturbed.
  double alpha() const noexcept;
  double beta() const noexcept;
  bool perturbs_a() const noexcept { return inv_alpha_sq_ > 0.0; }
  bool perturbs_b() const noexcept { return inv_beta_sq_ > 0.0; }

 private:
  NormWeights(double ia, double ib) : inv_alpha_sq_(ia), inv_beta_sq_(ib) {}

  double inv_alpha_sq_ = 1.0;
  double inv_beta_sq_ = 1.0;
};

enum class SolutionMethod { exact_sigma_min, trace_approx, one_norm_estimate, inf_norm_estimate };

std::string_view to_string(SolutionMethod method);
std::optional<SolutionMethod> parse_solution_method(std::string_view text);

struct ComponentCondition {
  std::size_t index = 0;
  double kappa_abs = 0.0;
  /// +inf when x_i == 0.
  std::optional<double> kappa_rel;
};

struct SolutionCondition {
  double kappa_abs = 0.0;
  /// Range implied by the norm inequalities used to replace ||R^{-1}||_2.
  /// Equal to kappa_abs for the exact method.
  double kappa_lower = 0.0;
  double kappa_upper = 0.0;
  std::optional<double> kappa_rel;
  SolutionMethod method = SolutionMethod::exact_sigma_min;
};

struct ConditionReport {
  std::vector<ComponentCondition> per_component;
  std::optional<SolutionCondition> solution;
  NormWeights weights;
  double sigma_sq_used = 0.0;
};

/// Norms of the data, used by the relative condition numbers. Missing values
/// fall back to what the solution recorded.
struct DataNorms {
  std::optional<double> a_fro;
  std::optional<double> b_norm;
};

/// Upper bound f(A, b) on the condition number of L^T x for an n x k L:
/// (||L^T (A^T A)^{-1}||^2 ||r||^2 / alpha^2 + ||L^T A^+||^2 (||x||^2 / alpha^2 + 1 / beta^2))^{1/2}.
/// Exact Frobenius condition number when k == 1 or L == I.
double f_general(const LlsSolution& sol, const Matrix& l_mat, NormWeights w);

/// Condition number of x_i. With b_only() weights this is ||e_i^T A^+||.
double kappa_component(const LlsSolution& sol, std::size_t i, NormWeights w);

/// Condition number of the whole solution, with ||R^{-1}||_2 obtained by
/// `method`.
double kappa_solution(const LlsSolution& sol, NormWeights w, SolutionMethod method);

/// kappa_solution plus the bracket implied by the norm substitution.
SolutionCondition assess_solution(const LlsSolution& sol, NormWeights w, SolutionMethod method);

/// ||(A, b)|| in the weighted product norm, rescaled so that infinite weights
/// drop their channel: sqrt(||A||_F^2 / ia + ||b||^2 / ib), zero-weight terms
/// omitted. Throws MissingData when a required norm is unknown.
double relative_data_norm(const LlsSolution& sol, NormWeights w, const DataNorms& norms = {});

/// kappa_abs * data_norm / |x_i| (+inf when x_i == 0). In b-only mode this is
/// ||e_i^T A^+|| ||b|| / |x_i|.
double kappa_relative_component(const LlsSolution& sol, std::size_t i, NormWeights w, double kappa_abs,
                                const DataNorms& norms = {});
/// kappa_abs * data_norm / ||x|| (+inf when x == 0).
double kappa_relative_solution(const LlsSolution& sol, NormWeights w, double kappa_abs,
                               const DataNorms& norms = {});

/// kappa_i(A, b) assembled from covariance quantities only. The column and
/// c_ii must have been computed with sigma^2 equal to sol.mse.
double kappa_component_statistical(const CovColumn& cov_col, double c_ii, const LlsSolution& sol, NormWeights w);

struct ConditionOptions {
  /// Components to report; ignored when all_components is set.
  std::vector<std::size_t> components;
  bool all_components = false;
  std::optional<SolutionMethod> solution_method;
  bool relative = false;
  DataNorms norms;
};

ConditionReport condition_report(const LlsSolution& sol, NormWeights w, const ConditionOptions& options);

struct SandwichResult {
  double f = 0.0;
  double sampled_max = 0.0;
  double upper_bound = 0.0;  // sqrt(2) f
  double lower_bound = 0.0;  // f / sqrt(3)
  std::size_t samples = 0;
  bool upper_ok = false;
  bool lower_ok = false;
};

/// Samples random directions (dA, db), differentiates L^T x along them by
/// central differences and normalises by the spectral product norm. Every
/// sample must stay below sqrt(2) f; sampled_max >= f / sqrt(3) is reported as
/// a witness only.
SandwichResult sandwich_check(const Matrix& a, std::span<const double> b, const Matrix& l_mat, NormWeights w,
                              std::size_t samples, std::uint64_t seed);

/// A^T A + diag(0, ..., 0, delta, ..., delta), delta starting at start_index.
Matrix kaula_regularize(const Matrix& n_mat, double delta, std::size_t start_index);

/// n x 1 matrix e_i.
Matrix unit_functional(std::size_t n, std::size_t i);

}  // namespace lls
