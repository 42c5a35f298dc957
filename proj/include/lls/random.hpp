#pragma once

#include <cstddef>
#include <cstdint>

#include "lls/dense.hpp"

namespace lls {

/// SplitMix64: the i-th output is a fixed bijective mix of seed + (i+1)*gamma,
/// so a stream is fully determined by (seed, counter).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed();
  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Vector gaussian_vector(std::size_t n, std::uint64_t seed);
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);
/// Gaussian direction scaled to unit two-norm.
Vector unit_vector(std::size_t n, std::uint64_t seed);

/// rows x cols matrix Q1 diag(s) Q2^T with singular values log-spaced from 1
/// down to 1/cond, built from seeded orthogonal factors.
Matrix conditioned_matrix(std::size_t rows, std::size_t cols, double cond, std::uint64_t seed);

}  // namespace lls
