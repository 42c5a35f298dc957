#include <doctest.h>

#include <cmath>

#include "lls/covariance.hpp"
#include "lls/laplace.hpp"
#include "lls/random.hpp"
#include "test_support.hpp"

using namespace lls;
using lls::testing::gauss_inverse;
using lls::testing::rel_err;
using lls::testing::seeded_problem;
using lls::testing::stacked_identity;

namespace {

// Upper triangle of the reference Laplace variance-covariance matrix (six decimals).
constexpr double kLaplaceCov[6][6] = {
    {0.005245, -0.000004, -0.499200, 0.137212, 0.235241, -0.186069},
    {0, 0.000004, 0.009873, 0.003302, 0.002779, -0.001235},
    {0, 0, 71.466023, -5.441882, -16.672689, 14.922752},
    {0, 0, 0, 10.860492, 5.418506, -4.896579},
    {0, 0, 0, 0, 66.088476, -28.467391},
    {0, 0, 0, 0, 0, 15.874809},
};

LlsSolution laplace_solution() {
  const NormalEquationsProblem p = load_laplace();
  return solve_normal_equations(p.n_mat, p.rhs, p.m, p.residual_norm_sq);
}

bool reference_match(double got, double want) {
  return std::abs(got - want) <= 1e-5 || rel_err(got, want) <= 1e-3;
}

// sigma^2 (A^T A)^{-1} by Gaussian elimination on the Gram matrix.
Matrix reference_covariance(const Matrix& a, double sigma_sq) { return sigma_sq * gauss_inverse(gram(a)); }

}  // namespace

TEST_CASE("cov_column: closed forms") {
  const LlsSolution s = solve_qr(stacked_identity(4, 2), Vector{1.0, 2.0, 3.0, 4.0});
  for (std::size_t i = 0; i < 2; ++i) {
    const CovColumn c = cov_column(s, i, 1.0);
    CHECK(c.index == i);
    CHECK(c.sigma_sq_used == 1.0);
    for (std::size_t j = 0; j < 2; ++j) CHECK(c.values[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }

  // 2x2 adjugate: (A^T A)^{-1} = [d -b; -b a] / (ad - b^2).
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 1.0}, {0.0, 1.0}});
  const Matrix g = gram(a);
  const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  const LlsSolution s2 = solve_qr(a, Vector{1.0, 0.0, 1.0});
  const CovColumn c0 = cov_column(s2, 0, 1.0);
  const CovColumn c1 = cov_column(s2, 1, 1.0);
  CHECK(rel_err(c0.values[0], g(1, 1) / det) <= 1e-14);
  CHECK(rel_err(c0.values[1], -g(0, 1) / det) <= 1e-14);
  CHECK(rel_err(c1.values[1], g(0, 0) / det) <= 1e-14);
  CHECK(rel_err(c1.values[0], c0.values[1]) <= 1e-14);

  CHECK_THROWS_AS(cov_column(s2, 2), Error);
}

TEST_CASE("cov_column: default sigma^2 is the mse") {
  const auto p = seeded_problem(9, 3, 50.0, 4);
  const LlsSolution s = solve_qr(p.a, p.b);
  const Matrix ref = reference_covariance(p.a, s.mse);
  for (std::size_t i = 0; i < 3; ++i) {
    const CovColumn c = cov_column(s, i);
    CHECK(c.sigma_sq_used == s.mse);
    for (std::size_t j = 0; j < 3; ++j) CHECK(rel_err(c.values[j], ref(j, i)) <= 1e-10);
  }
}

TEST_CASE("cov_column: Laplace first column") {
  const LlsSolution s = laplace_solution();
  const CovColumn c = cov_column(s, 0);
  for (std::size_t j = 0; j < 6; ++j) {
    const double want = j == 0 ? kLaplaceCov[0][0] : kLaplaceCov[0][j];
    CHECK(reference_match(c.values[j], want));
  }
}

TEST_CASE("cov_diagonal: closed forms and Laplace variance") {
  const LlsSolution d = solve_qr(Matrix::from_rows({{2.0, 0.0}, {0.0, 4.0}, {0.0, 0.0}}), Vector{1.0, 1.0, 1.0});
  const CovDiagonal diag = cov_diagonal(d, 1.0);
  CHECK(diag.values[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(diag.values[1] == doctest::Approx(0.0625).epsilon(1e-15));

  const CovDiagonal lap = cov_diagonal(laplace_solution());
  CHECK(rel_err(lap.values[1], 4.383233e-6) <= 1e-4);
  CHECK(rel_err(lap.sigma_sq_used, 31096.0 / 123.0) <= 1e-15);
  for (std::size_t i = 0; i < 6; ++i) CHECK(reference_match(lap.values[i], kLaplaceCov[i][i]));
}

TEST_CASE("cov_diagonal matches the full matrix and the column path") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = seeded_problem(11, 5, 1e3, seed);
    const LlsSolution s = solve_qr(p.a, p.b);
    const CovDiagonal diag = cov_diagonal(s);
    const CovFull full = cov_full(s);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(rel_err(diag.values[i], full.values(i, i)) <= 1e-12);
      CHECK(rel_err(diag.values[i], cov_column(s, i).values[i]) <= 1e-10);
    }
  }
}

TEST_CASE("cov_full: Laplace upper triangle") {
  const CovFull full = cov_full(laplace_solution());
  int matched = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i; j < 6; ++j) {
      CHECK_MESSAGE(reference_match(full.values(i, j), kLaplaceCov[i][j]), "entry (", i, ",", j, ")");
      matched += reference_match(full.values(i, j), kLaplaceCov[i][j]) ? 1 : 0;
    }
  }
  CHECK(matched == 21);
}

TEST_CASE("cov_full: symmetry, scaling and inverse certificate") {
  const LlsSolution id = solve_qr(stacked_identity(5, 3), Vector{1.0, 2.0, 3.0, 4.0, 5.0});
  const CovFull scaled = cov_full(id, 2.5);
  CHECK(max_abs(scaled.values - 2.5 * Matrix::identity(3)) <= 1e-15);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = seeded_problem(10, 4, 1e3, seed);
    const LlsSolution s = solve_qr(p.a, p.b);
    const CovFull c = cov_full(s, 3.0);
    CHECK(c.values == c.values.transposed());
    const Matrix cert = (1.0 / 3.0) * (c.values * gram(p.a));
    CHECK(max_abs(cert - Matrix::identity(4)) <= 1e-9);
    const Matrix ref = reference_covariance(p.a, 3.0);
    CHECK(max_abs(c.values - ref) <= 1e-9 * max_abs(ref));
  }
}

TEST_CASE("cov_trace") {
  const LlsSolution id = solve_qr(stacked_identity(5, 3), Vector{1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(cov_trace(id, 2.0).value == doctest::Approx(6.0).epsilon(1e-15));

  double reference = 0.0;
  for (int i = 0; i < 6; ++i) reference += kLaplaceCov[i][i];
  const CovTrace t = cov_trace(laplace_solution());
  CHECK(std::abs(t.value - reference) <= 6e-5);

  const auto p = seeded_problem(8, 3, 10.0, 6);
  const LlsSolution s = solve_qr(p.a, p.b);
  const CovDiagonal d = cov_diagonal(s);
  CHECK(rel_err(cov_trace(s).value, d.values[0] + d.values[1] + d.values[2]) <= 1e-15);
}

TEST_CASE("functional_variance") {
  const LlsSolution id = solve_qr(stacked_identity(4, 2), Vector{1.0, 2.0, 3.0, 4.0});
  CHECK(functional_variance(id, Vector{3.0, 4.0}, 1.0) == doctest::Approx(25.0));
  CHECK(functional_variance(id, Vector{0.0, 0.0}, 1.0) == 0.0);
  CHECK_THROWS_AS(functional_variance(id, Vector{1.0}, 1.0), Error);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = seeded_problem(9, 4, 100.0, seed);
    const LlsSolution s = solve_qr(p.a, p.b);
    const Matrix c = cov_full(s).values;
    const Vector ell = gaussian_vector(4, seed + 9);
    const double quad = dot(ell, multiply(c, ell));
    const double v = functional_variance(s, ell);
    CHECK(v >= 0.0);
    CHECK(rel_err(v, quad) <= 1e-10);
    // Scaling law in l and in sigma^2.
    Vector twice = ell;
    for (double& t : twice) t *= 2.0;
    CHECK(rel_err(functional_variance(s, twice), 4.0 * v) <= 1e-14);
    CHECK(rel_err(functional_variance(s, ell, 2.0 * s.mse), 2.0 * v) <= 1e-14);
  }
}

TEST_CASE("functional_variance over unit vectors is bounded by the top eigenvalue") {
  const auto p = seeded_problem(12, 4, 1e2, 3);
  const LlsSolution s = solve_qr(p.a, p.b);
  // lambda_max(C) = sigma^2 / sigma_min(A)^2.
  const double sm = lls::testing::sigma_min_power(p.a);
  const double lambda_max = s.mse / (sm * sm);
  double best = 0.0;
  for (std::uint64_t k = 0; k < 500; ++k) {
    const double v = functional_variance(s, unit_vector(4, 1000 + k));
    CHECK(v <= lambda_max * (1.0 + 1e-10));
    best = std::max(best, v);
  }
  CHECK(best >= 0.5 * lambda_max);
}
