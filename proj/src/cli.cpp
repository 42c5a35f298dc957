#include "lls/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "lls/conditioning.hpp"
#include "lls/covariance.hpp"
#include "lls/io.hpp"
#include "lls/laplace.hpp"
#include "lls/oracle.hpp"
#include "lls/report.hpp"

namespace lls {

namespace {

struct InputArgs {
  std::string matrix_path;
  std::string rhs_path;
  std::string normal_path;
  std::optional<std::size_t> m;
  std::optional<double> rss;
  std::optional<double> bnorm;
  std::optional<double> sigma2;
  bool laplace = false;
  std::string format;
  std::string out_path;
};

struct LoadedProblem {
  std::string mode;
  std::optional<Matrix> a;  // dense mode only
  Vector b;
  LlsSolution sol;
};

void add_input_options(CLI::App* cmd, InputArgs& in) {
  cmd->add_option("--matrix", in.matrix_path, "dense design matrix A (Matrix Market or CSV)");
  cmd->add_option("--rhs", in.rhs_path, "right-hand side b (dense mode) or A^T b (normal mode)");
  cmd->add_option("--normal", in.normal_path, "normal-equations matrix A^T A (Matrix Market or CSV)");
  cmd->add_option("--m", in.m, "observation count (normal mode)");
  cmd->add_option("--rss", in.rss, "residual sum of squares ||b - A x||^2 (normal mode)");
  cmd->add_option("--bnorm", in.bnorm, "||b||, needed for relative conditioning in normal mode");
  cmd->add_flag("--laplace", in.laplace, "use the bundled Laplace/Bouvart normal equations");
  cmd->add_option("--format", in.format, "input format override")->check(CLI::IsMember({"mm", "csv"}));
  cmd->add_option("--sigma2", in.sigma2, "known noise variance sigma_b^2 (overrides the mse)");
  cmd->add_option("--out", in.out_path, "write the report here instead of stdout");
}

double parse_weight(const std::string& text, const char* name) {
  if (text == "inf" || text == "+inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0 && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be a positive number or 'inf'");
}

LoadedProblem load_problem(const InputArgs& in) {
  const int modes = static_cast<int>(in.laplace) + static_cast<int>(!in.matrix_path.empty()) +
                    static_cast<int>(!in.normal_path.empty());
  if (modes != 1) throw Error(ErrorKind::InvalidArgument, "choose exactly one of --matrix, --normal, --laplace");

  std::optional<InputFormat> format;
  if (in.format == "mm") format = InputFormat::matrix_market;
  if (in.format == "csv") format = InputFormat::csv;

  if (in.laplace) {
    const NormalEquationsProblem p = load_laplace();
    return {"laplace", std::nullopt, {},
            solve_normal_equations(p.n_mat, p.rhs, p.m, p.residual_norm_sq,
                                   {.sigma_sq = in.sigma2, .b_norm = in.bnorm})};
  }
  if (in.rhs_path.empty()) throw Error(ErrorKind::InvalidArgument, "--rhs is required");
  if (!in.normal_path.empty()) {
    if (!in.m || !in.rss) throw Error(ErrorKind::InvalidArgument, "normal mode needs --m and --rss");
    const Matrix n_mat = read_matrix(in.normal_path, format);
    const Vector rhs = read_vector(in.rhs_path);
    return {"normal", std::nullopt, {},
            solve_normal_equations(n_mat, rhs, *in.m, *in.rss, {.sigma_sq = in.sigma2, .b_norm = in.bnorm})};
  }
  Matrix a = read_matrix(in.matrix_path, format);
  Vector b = read_vector(in.rhs_path);
  LlsSolution sol = solve_qr(a, b, {.sigma_sq = in.sigma2});
  return {"dense", std::move(a), std::move(b), std::move(sol)};
}

Json base_report(std::string_view command, const LoadedProblem& p) {
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command;
  r["problem"] = problem_json(p.sol, p.mode);
  r["solution"] = vector_json(p.sol.x);
  return r;
}

double rel_dev(double formula, double oracle) {
  if (formula == 0.0) return oracle == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(oracle - formula) / std::abs(formula);
}

struct ValidateArgs {
  std::string oracle;
  std::uint64_t seed = 1;
  std::size_t replicates = 10000;
  std::size_t samples = 500;
  std::size_t directions = 16;
  std::string alpha = "1";
  std::string beta = "1";
};

Json run_validate(const ValidateArgs& v, const LoadedProblem& p, bool& all_pass) {
  if (!p.a) throw Error(ErrorKind::InvalidArgument, "validation needs the dense matrix A (--matrix/--rhs)");
  const Matrix& a = *p.a;
  const LlsSolution& sol = p.sol;
  const std::size_t n = sol.n;
  const NormWeights w = NormWeights::from_alpha_beta(parse_weight(v.alpha, "--alpha"), parse_weight(v.beta, "--beta"));

  Json section;
  section["oracle"] = v.oracle;
  section["seed"] = v.seed;
  std::vector<ValidationCheck> checks;

  if (v.oracle == "jacobian") {
    constexpr double kTol = 1e-3;
    section["weights"] = weights_json(w);
    section["tolerance"] = kTol;
    for (std::size_t i = 0; i < n; ++i) {
      const double formula = kappa_component(sol, i, w);
      const double oracle = jacobian_kappa(a, p.b, unit_functional(n, i), w).sigma_max;
      const double dev = rel_dev(formula, oracle);
      checks.push_back({"kappa_component[" + std::to_string(i) + "]", formula, oracle, dev, "rel_dev <= 1e-3",
                        dev <= kTol});
    }
    const double formula = kappa_solution(sol, w, SolutionMethod::exact_sigma_min);
    const double oracle = jacobian_kappa(a, p.b, Matrix::identity(n), w).sigma_max;
    const double dev = rel_dev(formula, oracle);
    checks.push_back({"kappa_solution", formula, oracle, dev, "rel_dev <= 1e-3", dev <= kTol});
  } else if (v.oracle == "montecarlo") {
    if (v.replicates < 100) throw Error(ErrorKind::InvalidArgument, "--replicates must be at least 100");
    const double sigma_b = std::sqrt(sol.mse);
    if (!(sigma_b > 0.0)) throw Error(ErrorKind::InvalidArgument, "Monte Carlo validation needs sigma_b > 0");
    const StatisticalModel model{a, sol.x, sigma_b};
    section["replicates"] = v.replicates;
    section["directions"] = v.directions;
    section["sigma_b"] = sigma_b;
    const NormWeights b_only = NormWeights::b_only();
    std::vector<Vector> units;
    for (std::size_t i = 0; i < n; ++i) {
      Vector e(n, 0.0);
      e[i] = 1.0;
      units.push_back(std::move(e));
    }
    const Vector stds = functional_std(model, units, v.replicates, v.seed);
    for (std::size_t i = 0; i < n; ++i) {
      const double formula = kappa_component(sol, i, b_only);
      const double oracle = stds[i] / sigma_b;
      const double dev = rel_dev(formula, oracle);
      checks.push_back({"std_over_sigma[" + std::to_string(i) + "]", formula, oracle, dev, "rel_dev <= 0.05",
                        dev <= 0.05});
    }
    const double kls = kappa_solution(sol, b_only, SolutionMethod::exact_sigma_min);
    const double mfs = max_functional_std(model, v.replicates, v.directions, v.seed) / sigma_b;
    const double ratio = mfs / kls;
    checks.push_back({"max_functional_std_over_sigma", kls, mfs, ratio, "0.9 <= ratio <= 1.05",
                      ratio >= 0.9 && ratio <= 1.05});
  } else if (v.oracle == "sandwich") {
    section["weights"] = weights_json(w);
    section["samples"] = v.samples;
    auto add = [&](const std::string& name, const Matrix& l) {
      const SandwichResult s = sandwich_check(a, p.b, l, w, v.samples, v.seed);
      checks.push_back({name, s.f, s.sampled_max, s.sampled_max / s.f, "sampled_max <= sqrt(2) f", s.upper_ok});
    };
    for (std::size_t i = 0; i < n; ++i) add("sandwich_component[" + std::to_string(i) + "]", unit_functional(n, i));
    add("sandwich_solution", Matrix::identity(n));
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown oracle '" + v.oracle + "'");
  }

  all_pass = std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back(validation_check_json(c));
  section["checks"] = std::move(arr);
  section["pass"] = all_pass;
  return section;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Least squares solution, variance-covariance and conditioning diagnostics", "lls-sense"};
  app.require_subcommand(1);

  InputArgs in;

  auto* solve = app.add_subcommand("solve", "solve the least squares problem");
  add_input_options(solve, in);
  bool jupiter = false;
  solve->add_flag("--jupiter", jupiter, "print the planetary mass fractions derived from z0 and z1");

  auto* cov = app.add_subcommand("cov", "variance-covariance quantities");
  add_input_options(cov, in);
  std::optional<std::size_t> cov_column_index;
  bool cov_diag = false;
  bool cov_full_flag = false;
  bool cov_trace_flag = false;
  cov->add_option("--column", cov_column_index, "column i of C");
  cov->add_flag("--diag", cov_diag, "diagonal of C");
  cov->add_flag("--full", cov_full_flag, "whole matrix C");
  cov->add_flag("--trace", cov_trace_flag, "trace of C");

  auto* cond = app.add_subcommand("cond", "condition numbers");
  add_input_options(cond, in);
  std::string alpha = "1";
  std::string beta = "1";
  std::vector<std::size_t> components;
  bool all_components = false;
  bool solution_level = false;
  std::string method_name;
  bool relative = false;
  cond->add_option("--alpha", alpha, "weight on A perturbations (number or inf)");
  cond->add_option("--beta", beta, "weight on b perturbations (number or inf)");
  cond->add_option("--component", components, "component index (repeatable)");
  cond->add_flag("--all", all_components, "every component");
  cond->add_flag("--solution", solution_level, "solution-level condition number");
  cond->add_option("--method", method_name,
                   "exact-sigma-min | trace-approx | one-norm-estimate | inf-norm-estimate | norm-estimate");
  cond->add_flag("--relative", relative, "also report relative condition numbers");

  auto* validate = app.add_subcommand("validate", "compare formulas with brute-force oracles");
  add_input_options(validate, in);
  ValidateArgs vargs;
  validate->add_option("--oracle", vargs.oracle, "jacobian | montecarlo | sandwich")
      ->required()
      ->check(CLI::IsMember({"jacobian", "montecarlo", "sandwich"}));
  validate->add_option("--seed", vargs.seed, "random seed");
  validate->add_option("--replicates", vargs.replicates, "Monte Carlo replicates");
  validate->add_option("--samples", vargs.samples, "sandwich directions");
  validate->add_option("--directions", vargs.directions, "Monte Carlo functional directions");
  validate->add_option("--alpha", vargs.alpha, "weight on A perturbations (number or inf)");
  validate->add_option("--beta", vargs.beta, "weight on b perturbations (number or inf)");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Json report;
  int exit_code = kExitOk;
  try {
    const LoadedProblem p = load_problem(in);
    if (solve->parsed()) {
      report = base_report("solve", p);
      if (jupiter) {
        if (p.sol.n < 2) throw Error(ErrorKind::InvalidArgument, "--jupiter needs at least two unknowns");
        Json j;
        j["jupiter_mass"] = jupiter_mass(p.sol.x[1]);
        j["jupiter_sun_ratio"] = 1.0 / jupiter_mass(p.sol.x[1]);
        j["uranus_mass"] = uranus_mass(p.sol.x[0]);
        j["uranus_sun_ratio"] = 1.0 / uranus_mass(p.sol.x[0]);
        report["jupiter"] = std::move(j);
      }
    } else if (cov->parsed()) {
      if (!cov_column_index && !cov_diag && !cov_full_flag && !cov_trace_flag) {
        throw Error(ErrorKind::InvalidArgument, "choose at least one of --column, --diag, --full, --trace");
      }
      report = base_report("cov", p);
      Json c;
      c["sigma_sq"] = p.sol.mse;
      if (cov_column_index) {
        const CovColumn col = cov_column(p.sol, *cov_column_index);
        c["column"] = {{"index", col.index}, {"values", vector_json(col.values)}};
      }
      if (cov_diag) c["diagonal"] = vector_json(cov_diagonal(p.sol).values);
      if (cov_full_flag) c["full"] = matrix_json(cov_full(p.sol).values);
      if (cov_trace_flag) c["trace"] = cov_trace(p.sol).value;
      report["covariance"] = std::move(c);
    } else if (cond->parsed()) {
      const NormWeights w = NormWeights::from_alpha_beta(parse_weight(alpha, "--alpha"), parse_weight(beta, "--beta"));
      ConditionOptions opts;
      opts.components = components;
      opts.all_components = all_components;
      opts.relative = relative;
      std::optional<SolutionMethod> method;
      if (!method_name.empty()) {
        method = method_name == "norm-estimate" ? std::optional(SolutionMethod::inf_norm_estimate)
                                                : parse_solution_method(method_name);
        if (!method) throw Error(ErrorKind::InvalidArgument, "unknown --method " + method_name);
      }
      if (solution_level || method) opts.solution_method = method.value_or(SolutionMethod::exact_sigma_min);
      if (components.empty() && !all_components && !opts.solution_method) {
        opts.all_components = true;
        opts.solution_method = SolutionMethod::exact_sigma_min;
      }
      report = base_report("cond", p);
      report["conditioning"] = condition_json(condition_report(p.sol, w, opts));
    } else if (validate->parsed()) {
      report = base_report("validate", p);
      bool pass = false;
      report["validation"] = run_validate(vargs, p, pass);
      if (!pass) exit_code = kExitValidationFailed;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical(e.kind()) ? kExitNumerical : kExitUsage;
  }

  const std::string text = serialize_report(report);
  if (in.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(in.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << in.out_path << "'\n";
      return kExitUsage;
    }
    file << text;
  }
  return exit_code;
}

}  // namespace lls
