#include "lls/report.hpp"

#include <cmath>
#include <limits>

namespace lls {

Json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double json_number(const Json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::ParseError, "unexpected string in numeric field: " + s);
  }
  return j.get<double>();
}

Json vector_json(std::span<const double> v) {
  Json arr = Json::array();
  for (double t : v) arr.push_back(number_json(t));
  return arr;
}

Json matrix_json(const Matrix& a) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) rows.push_back(vector_json(a.row(i)));
  return rows;
}

Json problem_json(const LlsSolution& sol, std::string_view mode) {
  Json p;
  p["mode"] = mode;
  p["m"] = sol.m;
  p["n"] = sol.n;
  p["b_norm"] = sol.b_norm ? number_json(*sol.b_norm) : Json(nullptr);
  p["a_fro"] = sol.a_fro ? number_json(*sol.a_fro) : Json(nullptr);
  p["residual_norm"] = sol.residual_norm;
  p["x_norm"] = sol.x_norm;
  p["mse"] = sol.mse;
  p["mse_source"] = sol.mse_source == MseSource::estimated ? "estimated" : "supplied";
  p["factor_source"] = sol.factors.source() == FactorSource::qr_of_a ? "qr-of-a" : "cholesky-of-normal-equations";
  return p;
}

Json weights_json(NormWeights w) {
  Json j;
  j["alpha"] = number_json(w.alpha());
  j["beta"] = number_json(w.beta());
  j["inv_alpha_sq"] = w.inv_alpha_sq();
  j["inv_beta_sq"] = w.inv_beta_sq();
  return j;
}

Json condition_json(const ConditionReport& report) {
  Json j;
  j["weights"] = weights_json(report.weights);
  j["sigma_sq"] = report.sigma_sq_used;
  Json comps = Json::array();
  for (const auto& c : report.per_component) {
    Json e;
    e["index"] = c.index;
    e["kappa_abs"] = number_json(c.kappa_abs);
    if (c.kappa_rel) e["kappa_rel"] = number_json(*c.kappa_rel);
    comps.push_back(std::move(e));
  }
  j["components"] = std::move(comps);
  if (report.solution) {
    const auto& s = *report.solution;
    Json e;
    e["method"] = to_string(s.method);
    e["kappa_abs"] = number_json(s.kappa_abs);
    e["kappa_lower"] = number_json(s.kappa_lower);
    e["kappa_upper"] = number_json(s.kappa_upper);
    if (s.kappa_rel) e["kappa_rel"] = number_json(*s.kappa_rel);
    j["solution"] = std::move(e);
  }
  return j;
}

Json validation_check_json(const ValidationCheck& check) {
  Json j;
  j["name"] = check.name;
  j["formula"] = number_json(check.formula);
  j["oracle"] = number_json(check.oracle);
  j["deviation"] = number_json(check.deviation);
  j["criterion"] = check.criterion;
  j["pass"] = check.pass;
  return j;
}

std::string serialize_report(const Json& report) { return report.dump(2) + "\n"; }

Json parse_report(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace lls
