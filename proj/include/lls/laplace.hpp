#pragma once

// Bouvart's normal equations for the masses of Jupiter, Saturn and Uranus
// (129 observations, six unknowns z0..z5), as used by Laplace.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "lls/dense.hpp"

namespace lls {

struct NormalEquationsProblem {
  Matrix n_mat;
  Vector rhs;
  std::size_t m = 0;
  double residual_norm_sq = 0.0;
  std::optional<double> b_norm;
};

inline constexpr std::size_t kLaplaceObservations = 129;
inline constexpr double kLaplaceResidualNormSq = 31096.0;

/// CSV text of A^T A, one row per line, coefficients transcribed verbatim.
std::string_view laplace_matrix_text();
/// A^T b, one value per line.
std::string_view laplace_rhs_text();

std::uint64_t fnv1a64(std::string_view text);
/// FNV-1a hash of the matrix text followed by the rhs text.
std::uint64_t laplace_dataset_hash();

/// Parses the bundled dataset after checking its content hash; throws
/// ParseError if the embedded text has drifted.
NormalEquationsProblem load_laplace();

/// Mass of Jupiter as a fraction of the Sun's: (1 + z1) / 1067.09.
double jupiter_mass(double z1);
/// Mass of Uranus as a fraction of the Sun's: (1 + z0) / 19504.
double uranus_mass(double z0);

}  // namespace lls
