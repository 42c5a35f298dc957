#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "lls/conditioning.hpp"
#include "lls/oracle.hpp"
#include "lls/random.hpp"
#include "test_support.hpp"

using namespace lls;
using lls::testing::rel_err;
using lls::testing::seeded_problem;
using lls::testing::stacked_identity;

namespace {

const NormWeights kRegimes[] = {NormWeights{}, NormWeights::b_only(), NormWeights::a_only()};

// Restores LLS_SENSE_THREADS on scope exit.
class ThreadEnv {
 public:
  ThreadEnv() {
    if (const char* v = std::getenv("LLS_SENSE_THREADS")) saved_ = v, had_ = true;
  }
  ~ThreadEnv() {
    if (had_) {
      ::setenv("LLS_SENSE_THREADS", saved_.c_str(), 1);
    } else {
      ::unsetenv("LLS_SENSE_THREADS");
    }
  }
  void set(const char* v) { ::setenv("LLS_SENSE_THREADS", v, 1); }

 private:
  std::string saved_;
  bool had_ = false;
};

}  // namespace

TEST_CASE("jacobian_kappa: closed forms") {
  const Matrix a = stacked_identity(4, 2);
  const Vector b{1.0, 0.0, 0.0, 0.0};
  const JacobianOracleResult r = jacobian_kappa(a, b, Matrix::identity(2), NormWeights::b_only());
  CHECK(r.sigma_max == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.jacobian_rows == 2);
  CHECK(r.jacobian_cols == 4 * 2 + 4);

  const JacobianOracleResult z = jacobian_kappa(a, b, Matrix(2, 1), NormWeights{});
  CHECK(z.sigma_max == 0.0);
}

TEST_CASE("jacobian_kappa matches the closed-form numbers") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = seeded_problem(6, 3, 100.0, seed);
    const LlsSolution s = solve_qr(p.a, p.b);
    for (NormWeights w : kRegimes) {
      for (std::size_t i = 0; i < 3; ++i) {
        const JacobianOracleResult r = jacobian_kappa(p.a, p.b, unit_functional(3, i), w);
        CHECK(rel_err(r.sigma_max, kappa_component(s, i, w)) <= 1e-3);
      }
      const JacobianOracleResult all = jacobian_kappa(p.a, p.b, Matrix::identity(3), w);
      CHECK(rel_err(all.sigma_max, kappa_solution(s, w, SolutionMethod::exact_sigma_min)) <= 1e-3);
    }
  }
}

TEST_CASE("jacobian_kappa: whole solution dominates each component") {
  const auto p = seeded_problem(7, 3, 1e3, 9);
  const double whole = jacobian_kappa(p.a, p.b, Matrix::identity(3), NormWeights{}).sigma_max;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(jacobian_kappa(p.a, p.b, unit_functional(3, i), NormWeights{}).sigma_max <= whole * (1.0 + 1e-9));
  }
}

TEST_CASE("jacobian_kappa: deterministic and guarded") {
  const auto p = seeded_problem(6, 2, 10.0, 3);
  const JacobianOracleResult r1 = jacobian_kappa(p.a, p.b, Matrix::identity(2), NormWeights{});
  const JacobianOracleResult r2 = jacobian_kappa(p.a, p.b, Matrix::identity(2), NormWeights{});
  CHECK(r1.sigma_max == r2.sigma_max);
  CHECK(r1.sigma_max_doubled_step == r2.sigma_max_doubled_step);
  CHECK(rel_err(r1.sigma_max, r1.sigma_max_doubled_step) <= 1e-2);

  // 100 x 20: 2100 data entries.
  const Matrix big = conditioned_matrix(100, 20, 10.0, 1);
  try {
    jacobian_kappa(big, Vector(100, 1.0), Matrix::identity(20), NormWeights{});
    FAIL("expected ScaleExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ScaleExceeded);
  }
  CHECK_THROWS_AS(jacobian_kappa(p.a, Vector(5, 1.0), Matrix::identity(2), NormWeights{}), Error);
  CHECK_THROWS_AS(jacobian_kappa(p.a, p.b, Matrix::identity(3), NormWeights{}), Error);
}

TEST_CASE("Monte Carlo: closed forms") {
  const StatisticalModel quiet{stacked_identity(4, 2), Vector{1.0, 2.0}, 0.0};
  CHECK(monte_carlo_component_std(quiet, 0, 200, 1) == 0.0);

  const StatisticalModel unit{stacked_identity(4, 2), Vector{0.0, 0.0}, 1.0};
  for (std::size_t i = 0; i < 2; ++i) {
    const double sd = monte_carlo_component_std(unit, i, 10000, 5);
    CHECK(sd >= 0.97);
    CHECK(sd <= 1.03);
  }

  CHECK_THROWS_AS(monte_carlo_component_std(unit, 0, 99, 1), Error);
  CHECK_THROWS_AS(monte_carlo_component_std(unit, 2, 200, 1), Error);
}

TEST_CASE("Monte Carlo std matches sigma * kappa_i(b)") {
  const Matrix a = conditioned_matrix(10, 3, 100.0, 7);
  const StatisticalModel model{a, Vector{1.0, 2.0, -1.0}, 0.5};
  const LlsSolution s = solve_qr(a, multiply(a, model.x_true), {.sigma_sq = 1.0});
  for (std::size_t i = 0; i < 3; ++i) {
    const double sd = monte_carlo_component_std(model, i, 10000, 11);
    CHECK(rel_err(sd, 0.5 * kappa_component(s, i, NormWeights::b_only())) <= 0.05);
  }
}

TEST_CASE("max_functional_std approaches sigma * kappa_LS(b)") {
  const Matrix a = conditioned_matrix(12, 4, 1e3, 2);
  const StatisticalModel model{a, Vector{0.5, -1.0, 2.0, 0.0}, 1.0};
  const LlsSolution s = solve_qr(a, multiply(a, model.x_true), {.sigma_sq = 1.0});
  const double target = kappa_solution(s, NormWeights::b_only(), SolutionMethod::exact_sigma_min);
  const double got = max_functional_std(model, 10000, 16, 3);
  CHECK(got >= 0.9 * target);
  CHECK(got <= 1.05 * target);

  const Vector v = dominant_covariance_direction(a);
  CHECK(norm2(v) == doctest::Approx(1.0));
  CHECK(rel_err(std::sqrt(functional_variance(s, v, 1.0)), target) <= 1e-10);

  CHECK_THROWS_AS(max_functional_std(model, 10000, 0, 3), Error);
  CHECK_THROWS_AS(functional_std(model, std::vector<Vector>{Vector{1.0}}, 200, 1), Error);
}

TEST_CASE("replicates do not depend on the thread count") {
  ThreadEnv env;
  const Matrix a = conditioned_matrix(8, 3, 10.0, 4);
  const StatisticalModel model{a, Vector{1.0, 0.0, -1.0}, 0.3};

  env.set("1");
  CHECK(worker_count() == 1);
  const Matrix one = replicate_estimates(model, 1000, 42);
  env.set("4");
  CHECK(worker_count() == 4);
  const Matrix four = replicate_estimates(model, 1000, 42);
  env.set("7");
  const Matrix seven = replicate_estimates(model, 1000, 42);
  CHECK(one == four);
  CHECK(one == seven);

  env.set("not-a-number");
  CHECK(worker_count() >= 1);

  // Row r is the estimate for seed + r.
  const LlsSolution r5 = solve_qr(a, simulate_observations(model, 47), {.sigma_sq = 1.0});
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(one(5, j) - r5.x[j]) <= 1e-12);
}

TEST_CASE("jacobian_kappa agrees with the analytic Jacobian for general L") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = seeded_problem(8, 4, 1e3, seed);
    const Matrix l_mat = gaussian_matrix(4, 2, seed + 40);
    for (NormWeights w : kRegimes) {
      const double fd = jacobian_kappa(p.a, p.b, l_mat, w).sigma_max;
      const double an = lls::testing::analytic_jacobian_kappa(p.a, p.b, l_mat, w.inv_alpha_sq(), w.inv_beta_sq());
      CHECK(rel_err(fd, an) <= 1e-6);
      const double f = f_general(solve_qr(p.a, p.b), l_mat, w);
      // With one channel switched off the bound is attained; the reference
      // inverts A^T A, so its own error is ~cond(A)^2 ulp.
      CHECK(an <= f * (1.0 + 1e-8));
      CHECK(an >= f / std::sqrt(3.0));
    }
  }
}
