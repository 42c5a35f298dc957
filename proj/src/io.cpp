#include "lls/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace lls {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto pos = text.find('\n');
    lines.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return lines;
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) fail("not a number: '" + std::string(token) + "'");
  if (!std::isfinite(v)) fail("non-finite value: '" + std::string(token) + "'");
  return v;
}

std::size_t parse_count(std::string_view token) {
  token = trim(token);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) fail("not a count: '" + std::string(token) + "'");
  return v;
}

// Tokens separated by whitespace and/or commas.
std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

InputFormat detect_format(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  return (ext == ".mtx" || ext == ".mm") ? InputFormat::matrix_market : InputFormat::csv;
}

Matrix parse_matrix_market(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail("empty Matrix Market file");
  const auto banner = tokens(lines.front());
  if (banner.size() < 5 || lower(banner[0]) != "%%matrixmarket" || lower(banner[1]) != "matrix") {
    fail("missing %%MatrixMarket matrix banner");
  }
  const std::string layout = lower(banner[2]);
  const std::string field = lower(banner[3]);
  const std::string symmetry = lower(banner[4]);
  if (field != "real" && field != "integer" && field != "double") fail("unsupported field type '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric") fail("unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  std::vector<std::string_view> body;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto t = trim(lines[i]);
    if (t.empty() || t.front() == '%') continue;
    body.push_back(t);
  }
  if (body.empty()) fail("missing size line");
  const auto size = tokens(body.front());

  if (layout == "array") {
    if (size.size() != 2) fail("array size line must be 'rows cols'");
    const std::size_t rows = parse_count(size[0]);
    const std::size_t cols = parse_count(size[1]);
    if (rows == 0 || cols == 0) fail("matrix dimensions must be >= 1");
    if (symmetric && rows != cols) fail("symmetric matrix must be square");
    std::vector<double> values;
    for (std::size_t i = 1; i < body.size(); ++i)
      for (auto tok : tokens(body[i])) values.push_back(parse_double(tok));
    const std::size_t expected = symmetric ? rows * (rows + 1) / 2 : rows * cols;
    if (values.size() != expected) {
      fail("expected " + std::to_string(expected) + " values, found " + std::to_string(values.size()));
    }
    Matrix a(rows, cols);
    std::size_t k = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = symmetric ? j : 0; i < rows; ++i) {
        a(i, j) = values[k];
        if (symmetric) a(j, i) = values[k];
        ++k;
      }
    }
    return a;
  }
  if (layout == "coordinate") {
    if (size.size() != 3) fail("coordinate size line must be 'rows cols nnz'");
    const std::size_t rows = parse_count(size[0]);
    const std::size_t cols = parse_count(size[1]);
    const std::size_t nnz = parse_count(size[2]);
    if (rows == 0 || cols == 0) fail("matrix dimensions must be >= 1");
    if (body.size() - 1 != nnz) fail("entry count differs from header");
    Matrix a(rows, cols);
    for (std::size_t e = 1; e < body.size(); ++e) {
      const auto t = tokens(body[e]);
      if (t.size() != 3) fail("coordinate entry must be 'i j value'");
      const std::size_t i = parse_count(t[0]);
      const std::size_t j = parse_count(t[1]);
      if (i < 1 || i > rows || j < 1 || j > cols) fail("coordinate entry out of range");
      const double v = parse_double(t[2]);
      a(i - 1, j - 1) = v;
      if (symmetric) a(j - 1, i - 1) = v;
    }
    return a;
  }
  fail("unsupported layout '" + layout + "'");
}

Matrix parse_csv_matrix(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      const auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
      values.push_back(parse_double(field));
      ++count;
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (rows == 0) cols = count;
    if (count != cols) fail("row " + std::to_string(rows + 1) + " has " + std::to_string(count) + " fields, expected " +
                            std::to_string(cols));
    ++rows;
  }
  if (rows == 0) fail("empty CSV matrix");
  return Matrix(rows, cols, std::move(values));
}

Matrix parse_matrix(std::string_view text, InputFormat format) {
  return format == InputFormat::matrix_market ? parse_matrix_market(text) : parse_csv_matrix(text);
}

Vector parse_vector(std::string_view text) {
  if (trim(text).starts_with("%%")) {
    const Matrix m = parse_matrix_market(text);
    if (m.cols() != 1 && m.rows() != 1) fail("vector file must hold a single row or column");
    return Vector(m.data().begin(), m.data().end());
  }
  Vector v;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == '%') continue;
    for (auto tok : tokens(line)) v.push_back(parse_double(tok));
  }
  if (v.empty()) fail("empty vector");
  return v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix read_matrix(const std::filesystem::path& path, std::optional<InputFormat> format) {
  return parse_matrix(read_text_file(path), format.value_or(detect_format(path)));
}

Vector read_vector(const std::filesystem::path& path) { return parse_vector(read_text_file(path)); }

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_matrix_market(const Matrix& a) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) out += format_double(a(i, j)) + "\n";
  return out;
}

std::string format_vector(std::span<const double> v) {
  std::string out;
  for (double t : v) out += format_double(t) + "\n";
  return out;
}

}  // namespace lls
