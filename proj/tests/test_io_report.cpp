#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "lls/io.hpp"
#include "lls/laplace.hpp"
#include "lls/random.hpp"
#include "lls/report.hpp"

using namespace lls;

namespace {

const std::filesystem::path kDataDir = LLS_DATA_DIR;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;  // sentinel: no throw is flagged by callers
}

bool throws_parse_error(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == ErrorKind::ParseError;
  }
  return false;
}

}  // namespace

TEST_CASE("detect_format") {
  CHECK(detect_format("a.mtx") == InputFormat::matrix_market);
  CHECK(detect_format("dir/a.mm") == InputFormat::matrix_market);
  CHECK(detect_format("a.csv") == InputFormat::csv);
  CHECK(detect_format("a.txt") == InputFormat::csv);
}

TEST_CASE("Matrix Market: array and coordinate") {
  const Matrix arr = parse_matrix_market(
      "%%MatrixMarket matrix array real general\n"
      "% comment\n"
      "3 2\n1\n2\n3\n4\n5\n6\n");
  CHECK(arr == Matrix::from_rows({{1, 4}, {2, 5}, {3, 6}}));

  const Matrix coo = parse_matrix_market(
      "%%MatrixMarket matrix coordinate real general\n"
      "3 3 2\n1 1 2.5\n3 2 -1e-3\n");
  Matrix want(3, 3);
  want(0, 0) = 2.5;
  want(2, 1) = -1e-3;
  CHECK(coo == want);

  const Matrix sym = parse_matrix_market(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "2 2 3\n1 1 4\n2 1 1\n2 2 3\n");
  CHECK(sym == Matrix::from_rows({{4, 1}, {1, 3}}));

  const Matrix sym_arr = parse_matrix_market(
      "%%MatrixMarket matrix array real symmetric\n"
      "2 2\n4\n1\n3\n");
  CHECK(sym_arr == Matrix::from_rows({{4, 1}, {1, 3}}));
}

TEST_CASE("Matrix Market: malformed input") {
  CHECK(throws_parse_error([] { parse_matrix_market(""); }));
  CHECK(throws_parse_error([] { parse_matrix_market("3 2\n1\n2\n"); }));
  CHECK(throws_parse_error([] { parse_matrix_market("%%MatrixMarket matrix array complex general\n1 1\n1\n"); }));
  CHECK(throws_parse_error([] { parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n"); }));
  CHECK(throws_parse_error(
      [] { parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1\n2\n"); }));
  CHECK(throws_parse_error(
      [] { parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"); }));
  CHECK(throws_parse_error(
      [] { parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\nabc\n"); }));
}

TEST_CASE("CSV matrices") {
  CHECK(parse_csv_matrix("1,2\n3,4\n") == Matrix::from_rows({{1, 2}, {3, 4}}));
  CHECK(parse_csv_matrix("# header comment\n 1 , 2 \n\n3,4") == Matrix::from_rows({{1, 2}, {3, 4}}));
  CHECK(parse_csv_matrix("1e3,-2.5E-1\r\n0,1\r\n") == Matrix::from_rows({{1000, -0.25}, {0, 1}}));
  CHECK(throws_parse_error([] { parse_csv_matrix("1,2\n3\n"); }));
  CHECK(throws_parse_error([] { parse_csv_matrix("1,x\n"); }));
  CHECK(throws_parse_error([] { parse_csv_matrix("1,,2\n"); }));
  CHECK(throws_parse_error([] { parse_csv_matrix(""); }));
  CHECK(throws_parse_error([] { parse_csv_matrix("nan,1\n"); }));
}

TEST_CASE("vectors") {
  CHECK(parse_vector("1\n2\n3\n") == Vector{1, 2, 3});
  CHECK(parse_vector("1, 2, 3") == Vector{1, 2, 3});
  CHECK(parse_vector("# rhs\n1 2\n3") == Vector{1, 2, 3});
  CHECK(parse_vector("%%MatrixMarket matrix array real general\n2 1\n5\n6\n") == Vector{5, 6});
  CHECK(throws_parse_error([] { parse_vector("%%MatrixMarket matrix array real general\n2 2\n5\n6\n7\n8\n"); }));
  CHECK(parse_vector("%%MatrixMarket matrix array real general\n1 2\n5\n6\n") == Vector{5, 6});
  CHECK(throws_parse_error([] { parse_vector(""); }));
  CHECK(throws_parse_error([] { parse_vector("1 two 3"); }));
}

TEST_CASE("writers round-trip exactly") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, 2.0}) {
    CHECK(parse_vector(format_double(v)) == Vector{v});
  }
  CHECK(format_double(0.5) == "0.5");
  const Matrix a = gaussian_matrix(4, 3, 99);
  CHECK(parse_matrix_market(format_matrix_market(a)) == a);
  const Vector v = gaussian_vector(5, 7);
  CHECK(parse_vector(format_vector(v)) == v);
}

TEST_CASE("file readers") {
  const auto dir = std::filesystem::temp_directory_path() / "lls_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "a.mtx") << format_matrix_market(Matrix::identity(2));
    std::ofstream(dir / "a.csv") << "1,0\n0,1\n";
  }
  CHECK(read_matrix(dir / "a.mtx") == Matrix::identity(2));
  CHECK(read_matrix(dir / "a.csv") == Matrix::identity(2));
  CHECK(read_matrix(dir / "a.csv", InputFormat::csv) == Matrix::identity(2));
  CHECK(throws_parse_error([&] { read_matrix(dir / "a.mtx", InputFormat::csv); }));
  CHECK(kind_of([&] { read_text_file(dir / "missing.csv"); }) == ErrorKind::ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bundled Laplace data files match the embedded dataset") {
  CHECK(read_text_file(kDataDir / "laplace_normal.csv") == laplace_matrix_text());
  CHECK(read_text_file(kDataDir / "laplace_rhs.txt") == laplace_rhs_text());
  CHECK(laplace_dataset_hash() == 0xc94dbfd1dc4a66b5ULL);

  const Matrix n_mat = read_matrix(kDataDir / "laplace_normal.csv");
  const NormalEquationsProblem p = load_laplace();
  CHECK(n_mat == p.n_mat);
  CHECK(read_vector(kDataDir / "laplace_rhs.txt") == p.rhs);
  CHECK(p.m == kLaplaceObservations);
  CHECK(p.residual_norm_sq == kLaplaceResidualNormSq);
  CHECK(n_mat(0, 0) == 795938.0);
  CHECK(n_mat(1, 0) == -12729398.0);
  CHECK(n_mat == n_mat.transposed());
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("number encoding") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(number_json(inf) == "inf");
  CHECK(number_json(-inf) == "-inf");
  CHECK(number_json(1.5) == 1.5);
  CHECK(json_number(Json("inf")) == inf);
  CHECK(json_number(Json(2.25)) == 2.25);
  CHECK_THROWS_AS(json_number(Json("abc")), Error);
}

TEST_CASE("report documents round-trip bitwise") {
  const Matrix a = gaussian_matrix(7, 3, 5);
  const Vector b = gaussian_vector(7, 6);
  const LlsSolution s = solve_qr(a, b);
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["problem"] = problem_json(s, "dense");
  doc["x"] = vector_json(s.x);
  doc["c"] = matrix_json(cov_full(s).values);
  doc["conditioning"] = condition_json(condition_report(
      s, NormWeights::b_only(),
      {.all_components = true, .solution_method = SolutionMethod::trace_approx, .relative = true}));
  doc["check"] = validation_check_json({"k0", 1.0, 1.0005, 5e-4, "rel <= 1e-3", true});

  const std::string text = serialize_report(doc);
  CHECK(text.back() == '\n');
  const Json back = parse_report(text);
  CHECK(serialize_report(back) == text);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back["x"][i].get<double>() == s.x[i]);
  CHECK(back["problem"]["mse"].get<double>() == s.mse);
  CHECK(back["problem"]["factor_source"] == "qr-of-a");
  CHECK(back["conditioning"]["weights"]["alpha"] == "inf");
  CHECK(back["conditioning"]["components"].size() == 3);
  CHECK(back["check"]["pass"] == true);
  // Insertion order is preserved.
  CHECK(back.begin().key() == "schema_version");

  CHECK(throws_parse_error([] { parse_report("{not json"); }));
}
