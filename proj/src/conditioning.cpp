#include "lls/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lls/random.hpp"

namespace lls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_index(const LlsSolution& sol, std::size_t i) {
  if (i >= sol.n) {
    throw Error(ErrorKind::IndexOutOfRange, "component " + std::to_string(i) + " of " + std::to_string(sol.n));
  }
}

// kappa for a given value s of ||R^{-1}||_2 = ||A^+||_2.
double kappa_from_pinv_norm(const LlsSolution& sol, NormWeights w, double s) {
  const double r2 = sol.residual_norm * sol.residual_norm;
  const double x2 = sol.x_norm * sol.x_norm;
  return s * std::sqrt((s * s * r2 + x2) * w.inv_alpha_sq() + w.inv_beta_sq());
}

double largest_sv(const Matrix& m) {
  if (max_abs(m) == 0.0) return 0.0;
  return spectral_norm(m);
}

}  // namespace

NormWeights NormWeights::from_alpha_beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha and beta must be > 0");
  const double ia = std::isinf(alpha) ? 0.0 : 1.0 / (alpha * alpha);
  const double ib = std::isinf(beta) ? 0.0 : 1.0 / (beta * beta);
  return from_inverse_squares(ia, ib);
}

NormWeights NormWeights::from_inverse_squares(double inv_alpha_sq, double inv_beta_sq) {
  if (!(inv_alpha_sq >= 0.0) || !(inv_beta_sq >= 0.0) || !std::isfinite(inv_alpha_sq) ||
      !std::isfinite(inv_beta_sq)) {
    throw Error(ErrorKind::InvalidArgument, "weights must be finite and non-negative");
  }
  if (inv_alpha_sq == 0.0 && inv_beta_sq == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "alpha and beta cannot both be infinite");
  }
  return NormWeights(inv_alpha_sq, inv_beta_sq);
}

double NormWeights::alpha() const noexcept { return inv_alpha_sq_ == 0.0 ? kInf : 1.0 / std::sqrt(inv_alpha_sq_); }
double NormWeights::beta() const noexcept { return inv_beta_sq_ == 0.0 ? kInf : 1.0 / std::sqrt(inv_beta_sq_); }

std::string_view to_string(SolutionMethod method) {
  switch (method) {
    case SolutionMethod::exact_sigma_min: return "exact-sigma-min";
    case SolutionMethod::trace_approx: return "trace-approx";
    case SolutionMethod::one_norm_estimate: return "one-norm-estimate";
    case SolutionMethod::inf_norm_estimate: return "inf-norm-estimate";
  }
  return "unknown";
}

std::optional<SolutionMethod> parse_solution_method(std::string_view text) {
  for (auto m : {SolutionMethod::exact_sigma_min, SolutionMethod::trace_approx, SolutionMethod::one_norm_estimate,
                 SolutionMethod::inf_norm_estimate}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

double f_general(const LlsSolution& sol, const Matrix& l_mat, NormWeights w) {
  const std::size_t n = sol.n;
  if (l_mat.rows() != n) throw Error(ErrorKind::DimensionMismatch, "L must have n rows");
  if (l_mat.cols() > n) throw Error(ErrorKind::DimensionMismatch, "L must have at most n columns");
  const std::size_t k = l_mat.cols();
  Matrix y(n, k);  // R^{-T} L
  Matrix z(n, k);  // R^{-1} R^{-T} L
  for (std::size_t j = 0; j < k; ++j) {
    const Vector yj = tri_solve(sol.factors, l_mat.col(j), TriSolveMode::transposed);
    const Vector zj = tri_solve(sol.factors, yj, TriSolveMode::plain);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, j) = yj[i];
      z(i, j) = zj[i];
    }
  }
  const double pinv = largest_sv(y);
  const double inv_gram = largest_sv(z);
  const double r2 = sol.residual_norm * sol.residual_norm;
  const double x2 = sol.x_norm * sol.x_norm;
  return std::sqrt(inv_gram * inv_gram * r2 * w.inv_alpha_sq() + pinv * pinv * (x2 * w.inv_alpha_sq() + w.inv_beta_sq()));
}

double kappa_component(const LlsSolution& sol, std::size_t i, NormWeights w) {
  check_index(sol, i);
  Vector e(sol.n, 0.0);
  e[i] = 1.0;
  const Vector y = tri_solve(sol.factors, e, TriSolveMode::transposed);
  const double pinv_row = norm2(y);
  const double x2 = sol.x_norm * sol.x_norm;
  double k = pinv_row * pinv_row * (x2 * w.inv_alpha_sq() + w.inv_beta_sq());
  if (w.perturbs_a()) {
    const Vector z = tri_solve(sol.factors, y, TriSolveMode::plain);
    const double gram_row = norm2(z) * sol.residual_norm;
    k += gram_row * gram_row * w.inv_alpha_sq();
  }
  return std::sqrt(k);
}

SolutionCondition assess_solution(const LlsSolution& sol, NormWeights w, SolutionMethod method) {
  const double root_n = std::sqrt(static_cast<double>(sol.n));
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  switch (method) {
    case SolutionMethod::exact_sigma_min: {
      point = 1.0 / smallest_singular_value(sol.factors);
      lo = hi = point;
      break;
    }
    case SolutionMethod::trace_approx: {
      // ||R^{-1}||_F^2 = trace(C) / sigma^2.
      const double fro = std::sqrt(cov_trace(sol, 1.0).value);
      point = fro;
      lo = fro / root_n;
      hi = fro;
      break;
    }
    case SolutionMethod::one_norm_estimate:
    case SolutionMethod::inf_norm_estimate: {
      const NormKind kind = method == SolutionMethod::one_norm_estimate ? NormKind::one : NormKind::infinity;
      const double est = inv_norm_estimate(sol.factors, kind);
      point = est;
      lo = est / root_n;
      hi = est * root_n;
      break;
    }
  }
  SolutionCondition out;
  out.method = method;
  out.kappa_abs = kappa_from_pinv_norm(sol, w, point);
  out.kappa_lower = kappa_from_pinv_norm(sol, w, lo);
  out.kappa_upper = kappa_from_pinv_norm(sol, w, hi);
  return out;
}

double kappa_solution(const LlsSolution& sol, NormWeights w, SolutionMethod method) {
  return assess_solution(sol, w, method).kappa_abs;
}

double relative_data_norm(const LlsSolution& sol, NormWeights w, const DataNorms& norms) {
  double sum = 0.0;
  if (w.perturbs_a()) {
    const std::optional<double> a = norms.a_fro ? norms.a_fro : sol.a_fro;
    if (!a) throw Error(ErrorKind::MissingData, "||A||_F is required for relative conditioning");
    sum += *a * *a / w.inv_alpha_sq();
  }
  if (w.perturbs_b()) {
    const std::optional<double> b = norms.b_norm ? norms.b_norm : sol.b_norm;
    if (!b) throw Error(ErrorKind::MissingData, "||b|| is required for relative conditioning (supply --bnorm)");
    sum += *b * *b / w.inv_beta_sq();
  }
  return std::sqrt(sum);
}

double kappa_relative_component(const LlsSolution& sol, std::size_t i, NormWeights w, double kappa_abs,
                                const DataNorms& norms) {
  check_index(sol, i);
  const double data = relative_data_norm(sol, w, norms);
  const double g = std::abs(sol.x[i]);
  if (g == 0.0) return kInf;
  return kappa_abs * data / g;
}

double kappa_relative_solution(const LlsSolution& sol, NormWeights w, double kappa_abs, const DataNorms& norms) {
  const double data = relative_data_norm(sol, w, norms);
  if (sol.x_norm == 0.0) return kInf;
  return kappa_abs * data / sol.x_norm;
}

double kappa_component_statistical(const CovColumn& cov_col, double c_ii, const LlsSolution& sol, NormWeights w) {
  check_index(sol, cov_col.index);
  if (cov_col.values.size() != sol.n) throw Error(ErrorKind::DimensionMismatch, "covariance column length");
  const double s2 = sol.mse;
  if (std::abs(cov_col.sigma_sq_used - s2) > 1e-12 * std::max(std::abs(s2), std::abs(cov_col.sigma_sq_used))) {
    throw Error(ErrorKind::InconsistentSigma, "covariance column was computed with a different sigma^2");
  }
  if (!(s2 > 0.0)) throw Error(ErrorKind::DegenerateMse, "sigma^2 = 0: covariance carries no scale");

  const double col_sq = dot(cov_col.values, cov_col.values);
  const double x2 = sol.x_norm * sol.x_norm;
  // ||r||^2 / sigma^2, which is exactly m - n when sigma^2 is the mse.
  const double resid_over_var = sol.mse_source == MseSource::estimated
                                    ? static_cast<double>(sol.m - sol.n)
                                    : sol.residual_norm * sol.residual_norm / s2;
  const double inside = col_sq * resid_over_var * w.inv_alpha_sq() + c_ii * x2 * w.inv_alpha_sq() +
                        c_ii * w.inv_beta_sq();
  return std::sqrt(inside) / std::sqrt(s2);
}

ConditionReport condition_report(const LlsSolution& sol, NormWeights w, const ConditionOptions& options) {
  ConditionReport report;
  report.weights = w;
  report.sigma_sq_used = sol.mse;

  std::vector<std::size_t> indices = options.components;
  if (options.all_components) {
    indices.resize(sol.n);
    for (std::size_t i = 0; i < sol.n; ++i) indices[i] = i;
  }
  for (std::size_t i : indices) {
    ComponentCondition c;
    c.index = i;
    c.kappa_abs = kappa_component(sol, i, w);
    if (options.relative) c.kappa_rel = kappa_relative_component(sol, i, w, c.kappa_abs, options.norms);
    report.per_component.push_back(c);
  }
  if (options.solution_method) {
    SolutionCondition s = assess_solution(sol, w, *options.solution_method);
    if (options.relative) s.kappa_rel = kappa_relative_solution(sol, w, s.kappa_abs, options.norms);
    report.solution = s;
  }
  return report;
}

SandwichResult sandwich_check(const Matrix& a, std::span<const double> b, const Matrix& l_mat, NormWeights w,
                              std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "at least one sample is required");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const QrFactors base = householder_qr(a);
  const LlsSolution sol = solve_with_factors(base, b, SolveOptions{.sigma_sq = 1.0});

  SandwichResult out;
  out.f = f_general(sol, l_mat, w);
  out.upper_bound = std::sqrt(2.0) * out.f;
  out.lower_bound = out.f / std::sqrt(3.0);
  out.samples = samples;

  const double data_size = std::hypot(frobenius_norm(a), norm2(b));
  const double sa = std::sqrt(w.inv_alpha_sq());
  const double sb = std::sqrt(w.inv_beta_sq());

  auto functional = [&](const Matrix& ap, std::span<const double> bp) {
    const Vector x = solve_qr(ap, bp, SolveOptions{.sigma_sq = 1.0}).x;
    return multiply_transposed(l_mat, x);
  };

  bool all_below = true;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::uint64_t sample_seed = seed + s;
    Matrix e_a(m, n);
    Vector e_b(m, 0.0);
    if (w.perturbs_a()) e_a = gaussian_matrix(m, n, sample_seed);
    if (w.perturbs_b()) e_b = gaussian_vector(m, sample_seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    const double unit = std::hypot(frobenius_norm(e_a), norm2(e_b));
    e_a = (1.0 / unit) * e_a;
    for (double& v : e_b) v /= unit;

    // Data-space direction (dA, db) = (E / alpha, e / beta); its spectral
    // product norm is sqrt(||E||_2^2 + ||e||^2).
    const Matrix d_a = sa * e_a;
    Vector d_b = e_b;
    for (double& v : d_b) v *= sb;
    const double dir_size = std::hypot(frobenius_norm(d_a), norm2(d_b));
    const double h = std::sqrt(kUlp) * (1.0 + data_size) / dir_size;

    const Matrix a_plus = a + h * d_a;
    const Matrix a_minus = a - h * d_a;
    Vector b_plus(b.begin(), b.end());
    Vector b_minus(b.begin(), b.end());
    for (std::size_t i = 0; i < m; ++i) {
      b_plus[i] += h * d_b[i];
      b_minus[i] -= h * d_b[i];
    }
    const Vector g_plus = functional(a_plus, b_plus);
    const Vector g_minus = functional(a_minus, b_minus);
    Vector deriv(g_plus.size());
    for (std::size_t i = 0; i < deriv.size(); ++i) deriv[i] = (g_plus[i] - g_minus[i]) / (2.0 * h);

    const double spec_a = w.perturbs_a() ? spectral_norm(e_a) : 0.0;
    const double ratio = norm2(deriv) / std::hypot(spec_a, norm2(e_b));
    out.sampled_max = std::max(out.sampled_max, ratio);
    if (ratio > out.upper_bound * (1.0 + 1e-6)) all_below = false;
  }
  out.upper_ok = all_below;
  out.lower_ok = out.sampled_max >= out.lower_bound;
  return out;
}

Matrix kaula_regularize(const Matrix& n_mat, double delta, std::size_t start_index) {
  if (n_mat.rows() != n_mat.cols()) throw Error(ErrorKind::DimensionMismatch, "normal matrix must be square");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
  if (start_index > n_mat.rows()) throw Error(ErrorKind::IndexOutOfRange, "start index beyond n");
  Matrix out = n_mat;
  for (std::size_t i = start_index; i < n_mat.rows(); ++i) out(i, i) += delta;
  return out;
}

Matrix unit_functional(std::size_t n, std::size_t i) {
  if (i >= n) throw Error(ErrorKind::IndexOutOfRange, "unit functional index");
  Matrix l(n, 1);
  l(i, 0) = 1.0;
  return l;
}

}  // namespace lls
