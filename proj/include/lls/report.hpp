#pragma once

// JSON report documents (schema_version "1"). Doubles are written in their
// shortest round-trip form; infinite values are written as the string "inf".

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lls/conditioning.hpp"
#include "lls/covariance.hpp"
#include "lls/solver.hpp"

namespace lls {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";

Json number_json(double v);
/// Inverse of number_json: accepts numbers and "inf"/"-inf".
double json_number(const Json& j);

Json vector_json(std::span<const double> v);
Json matrix_json(const Matrix& a);

Json problem_json(const LlsSolution& sol, std::string_view mode);
Json weights_json(NormWeights w);
Json condition_json(const ConditionReport& report);

struct ValidationCheck {
  std::string name;
  double formula = 0.0;
  double oracle = 0.0;
  /// |oracle - formula| / |formula|, or the ratio oracle / formula for
  /// bracket checks.
  double deviation = 0.0;
  std::string criterion;
  bool pass = false;
};

Json validation_check_json(const ValidationCheck& check);

std::string serialize_report(const Json& report);
Json parse_report(std::string_view text);

}  // namespace lls
