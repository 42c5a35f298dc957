#pragma once

// Text input: Matrix Market array/coordinate files and header-free CSV for
// matrices; one value per line or comma/space separated lists for vectors.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lls/dense.hpp"

namespace lls {

enum class InputFormat { matrix_market, csv };

/// .mtx / .mm select Matrix Market, anything else CSV.
InputFormat detect_format(const std::filesystem::path& path);

Matrix parse_matrix_market(std::string_view text);
Matrix parse_csv_matrix(std::string_view text);
Matrix parse_matrix(std::string_view text, InputFormat format);
/// Also accepts a Matrix Market array file with a single column.
Vector parse_vector(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
Matrix read_matrix(const std::filesystem::path& path, std::optional<InputFormat> format = std::nullopt);
Vector read_vector(const std::filesystem::path& path);

/// "%%MatrixMarket matrix array real general", column-major, round-trip
/// exact values.
std::string format_matrix_market(const Matrix& a);
std::string format_vector(std::span<const double> v);
/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace lls
