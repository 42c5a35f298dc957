#include "lls/laplace.hpp"

#include "lls/io.hpp"

namespace lls {

namespace {

// Transcribed verbatim, including the mixed precision of the original
// coefficients. Must stay byte-identical to data/laplace_normal.csv and
// data/laplace_rhs.txt.
constexpr std::string_view kMatrixText =
    "795938,-12729398,6788.2,-1959.0,696.13,2602\n"
    "-12729398,424865729,-153106.5,-39749.1,-5459,5722\n"
    "6788.2,-153106.5,71.8720,-3.2252,1.2484,1.3371\n"
    "-1959.0,-39749.1,-3.2252,57.1911,3.6213,1.1128\n"
    "696.13,-5459,1.2484,3.6213,21.543,46.310\n"
    "2602,5722,1.3371,1.1128,46.310,129\n"
    ;

constexpr std::string_view kRhsText =
    "7212.600\n"
    "-738297.800\n"
    "237.782\n"
    "-40.335\n"
    "-343.455\n"
    "-1002.900\n"
    ;

constexpr std::uint64_t kLaplaceDatasetHash = 0xc94dbfd1dc4a66b5ULL;

std::uint64_t fnv1a64_continue(std::uint64_t h, std::string_view text) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string_view laplace_matrix_text() { return kMatrixText; }
std::string_view laplace_rhs_text() { return kRhsText; }

std::uint64_t fnv1a64(std::string_view text) { return fnv1a64_continue(0xcbf29ce484222325ULL, text); }

std::uint64_t laplace_dataset_hash() { return fnv1a64_continue(fnv1a64(kMatrixText), kRhsText); }

NormalEquationsProblem load_laplace() {
  if (laplace_dataset_hash() != kLaplaceDatasetHash) {
    throw Error(ErrorKind::ParseError, "bundled Laplace dataset does not match its pinned hash");
  }
  return NormalEquationsProblem{
      .n_mat = parse_csv_matrix(kMatrixText),
      .rhs = parse_vector(kRhsText),
      .m = kLaplaceObservations,
      .residual_norm_sq = kLaplaceResidualNormSq,
      .b_norm = std::nullopt,
  };
}

double jupiter_mass(double z1) { return (1.0 + z1) / 1067.09; }
double uranus_mass(double z0) { return (1.0 + z0) / 19504.0; }

}  // namespace lls
