#include "lls/random.hpp"

#include <cmath>
#include <numbers>

namespace lls {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform_open_closed() {
  return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open_closed();
  const double u2 = uniform_open_closed();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector gaussian_vector(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vector v(n);
  for (double& t : v) t = rng.normal();
  return v;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  return Matrix(rows, cols, gaussian_vector(rows * cols, seed));
}

Vector unit_vector(std::size_t n, std::uint64_t seed) {
  Vector v = gaussian_vector(n, seed);
  const double nrm = norm2(v);
  for (double& t : v) t /= nrm;
  return v;
}

Matrix conditioned_matrix(std::size_t rows, std::size_t cols, double cond, std::uint64_t seed) {
  const Matrix q1 = householder_qr(gaussian_matrix(rows, cols, seed)).form_q();
  const Matrix q2 = householder_qr(gaussian_matrix(cols, cols, seed ^ 0x5DEECE66DULL)).form_q();
  Matrix scaled = q1;
  for (std::size_t j = 0; j < cols; ++j) {
    const double t = cols == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(cols - 1);
    const double s = std::pow(cond, -t);
    for (std::size_t i = 0; i < rows; ++i) scaled(i, j) *= s;
  }
  return scaled * q2.transposed();
}

}  // namespace lls
