#include "lls/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <thread>

#include "lls/random.hpp"

namespace lls {

namespace {

constexpr double kStepTolerance = 1e-2;

Matrix scaled_jacobian(const Matrix& a, std::span<const double> b, const Matrix& l_mat, NormWeights w,
                       double step_factor) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t k = l_mat.cols();
  const std::size_t cols = m * n + m;
  Matrix jac(k, cols);

  const double sa = std::sqrt(w.inv_alpha_sq());
  const double sb = std::sqrt(w.inv_beta_sq());
  const SolveOptions opts{.sigma_sq = 1.0};

  auto store = [&](std::size_t col, const Vector& xp, const Vector& xm, double h, double scale) {
    Vector diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = (xp[i] - xm[i]) / (2.0 * h);
    const Vector g = multiply_transposed(l_mat, diff);
    for (std::size_t r = 0; r < k; ++r) jac(r, col) = scale * g[r];
  };

  if (w.perturbs_a()) {
    Matrix work = a;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        const double v = a(p, q);
        const double h = step_factor * std::sqrt(kUlp) * (1.0 + std::abs(v));
        work(p, q) = v + h;
        const Vector xp = solve_qr(work, b, opts).x;
        work(p, q) = v - h;
        const Vector xm = solve_qr(work, b, opts).x;
        work(p, q) = v;
        store(p * n + q, xp, xm, h, sa);
      }
    }
  }
  if (w.perturbs_b()) {
    const QrFactors qr = householder_qr(a);
    Vector work(b.begin(), b.end());
    for (std::size_t p = 0; p < m; ++p) {
      const double v = b[p];
      const double h = step_factor * std::sqrt(kUlp) * (1.0 + std::abs(v));
      work[p] = v + h;
      const Vector xp = solve_with_factors(qr, work, opts).x;
      work[p] = v - h;
      const Vector xm = solve_with_factors(qr, work, opts).x;
      work[p] = v;
      store(m * n + p, xp, xm, h, sb);
    }
  }
  return jac;
}

double largest_singular_value(const Matrix& m) {
  if (max_abs(m) == 0.0) return 0.0;
  return singular_values(m).front();
}

double sample_std(std::span<const double> values) {
  const double count = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= count;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (count - 1.0));
}

void require_replicates(std::size_t replicates) {
  if (replicates < 100) throw Error(ErrorKind::InvalidArgument, "Monte Carlo needs at least 100 replicates");
}

}  // namespace

JacobianOracleResult jacobian_kappa(const Matrix& a, std::span<const double> b, const Matrix& l_mat, NormWeights w) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw Error(ErrorKind::DimensionMismatch, "rhs length differs from matrix rows");
  if (l_mat.rows() != n) throw Error(ErrorKind::DimensionMismatch, "L must have n rows");
  if (m * n + m > kMaxOracleDataSize) {
    throw Error(ErrorKind::ScaleExceeded, "m*n + m = " + std::to_string(m * n + m) + " exceeds " +
                                              std::to_string(kMaxOracleDataSize));
  }
  householder_qr(a);  // rank check up front

  JacobianOracleResult out{.l_mat_used = l_mat};
  out.jacobian_rows = l_mat.cols();
  out.jacobian_cols = m * n + m;
  out.fd_step = std::sqrt(kUlp);
  out.sigma_max = largest_singular_value(scaled_jacobian(a, b, l_mat, w, 1.0));
  out.sigma_max_doubled_step = largest_singular_value(scaled_jacobian(a, b, l_mat, w, 2.0));

  const double scale = std::max(out.sigma_max, out.sigma_max_doubled_step);
  if (scale > 0.0 && std::abs(out.sigma_max - out.sigma_max_doubled_step) > kStepTolerance * scale) {
    throw Error(ErrorKind::FdStepUnstable, "finite-difference Jacobian depends on the step size");
  }
  return out;
}

std::size_t worker_count() {
  std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LLS_SENSE_THREADS")) {
    const std::string_view text(env);
    std::size_t cap = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0) workers = cap;
  }
  return workers;
}

Matrix replicate_estimates(const StatisticalModel& model, std::size_t replicates, std::uint64_t seed) {
  if (replicates == 0) throw Error(ErrorKind::InvalidArgument, "replicates must be positive");
  const QrFactors qr = householder_qr(model.a);
  const std::size_t n = model.a.cols();
  Matrix estimates(replicates, n);

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const Vector b = simulate_observations(model, seed + r);
      const Vector qtb = qr.apply_qt(b);
      const Vector x = tri_solve(qr, std::span<const double>(qtb.data(), n), TriSolveMode::plain);
      std::copy(x.begin(), x.end(), estimates.row(r).begin());
    }
  };

  const std::size_t workers = std::min(worker_count(), replicates);
  if (workers <= 1) {
    run(0, replicates);
    return estimates;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (replicates + workers - 1) / workers;
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(replicates, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(run, begin, end);
  }
  pool.clear();
  return estimates;
}

double monte_carlo_component_std(const StatisticalModel& model, std::size_t i, std::size_t replicates,
                                 std::uint64_t seed) {
  require_replicates(replicates);
  if (i >= model.a.cols()) throw Error(ErrorKind::IndexOutOfRange, "component index");
  const Matrix est = replicate_estimates(model, replicates, seed);
  return sample_std(est.col(i));
}

Vector functional_std(const StatisticalModel& model, std::span<const Vector> ells, std::size_t replicates,
                      std::uint64_t seed) {
  require_replicates(replicates);
  const std::size_t n = model.a.cols();
  for (const Vector& ell : ells) {
    if (ell.size() != n) throw Error(ErrorKind::DimensionMismatch, "direction length differs from n");
  }
  const Matrix est = replicate_estimates(model, replicates, seed);
  Vector out;
  out.reserve(ells.size());
  Vector proj(replicates);
  for (const Vector& ell : ells) {
    for (std::size_t r = 0; r < replicates; ++r) proj[r] = dot(est.row(r), ell);
    out.push_back(sample_std(proj));
  }
  return out;
}

Vector dominant_covariance_direction(const Matrix& a) {
  const QrFactors qr = householder_qr(a);
  const std::size_t n = a.cols();
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  constexpr int kMaxIterations = 2000;
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector next = tri_solve(qr, tri_solve(qr, v, TriSolveMode::transposed), TriSolveMode::plain);
    const double nrm = norm2(next);
    for (double& t : next) t /= nrm;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - v[i]));
    v = std::move(next);
    if (change < 1e-14) break;
  }
  return v;
}

double max_functional_std(const StatisticalModel& model, std::size_t replicates, std::size_t directions,
                          std::uint64_t seed) {
  if (directions < 1) throw Error(ErrorKind::InvalidArgument, "at least one direction is required");
  const std::size_t n = model.a.cols();
  std::vector<Vector> ells;
  ells.push_back(dominant_covariance_direction(model.a));
  for (std::size_t d = 1; d < directions; ++d) ells.push_back(unit_vector(n, seed ^ (0x9E3779B9ULL * (d + 1))));
  const Vector stds = functional_std(model, ells, replicates, seed);
  return *std::max_element(stds.begin(), stds.end());
}

}  // namespace lls
