#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "otr/data.hpp"
#include "otr/error.hpp"
#include "otr/inference.hpp"
#include "otr/kernels.hpp"
#include "otr/optimizer.hpp"
#include "otr/oracle.hpp"
#include "otr/parallel.hpp"
#include "otr/propensity.hpp"
#include "otr/simulate.hpp"

namespace otr::cli {

namespace {

using json = nlohmann::ordered_json;

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::estimate: return "estimate";
    case Subcommand::bootstrap: return "bootstrap";
    case Subcommand::oracle: return "oracle";
    case Subcommand::simulate: return "simulate";
  }
  return "unknown";
}

// 12 significant digits; non-finite values become null.
json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

json config_json(const RunConfig& c) {
  json j;
  j["subcommand"] = to_string(c.subcommand);
  if (c.subcommand != Subcommand::simulate) {
    j["input"] = c.input.string();
    j["outcome"] = c.outcome;
    j["treatment"] = c.treatment;
    j["covariates"] = c.covariates;
    j["anchor"] = c.anchor;
    j["add_intercept"] = c.add_intercept;
  }
  j["kernel"] = c.kernel;
  j["mode"] = c.mode;
  j["alpha0"] = num(c.alpha0);
  j["gamma"] = num(c.gamma);
  j["max_iter"] = c.max_iterations;
  j["tol"] = num(c.tolerance);
  j["B"] = c.replicates_b;
  j["alpha"] = num(c.alpha);
  j["weights"] = c.weights;
  j["warm_start"] = c.warm_start;
  j["seed"] = c.seed;
  j["observational"] = c.observational;
  j["propensity_covariates"] = c.propensity_covariates;
  j["max_n"] = c.max_n;
  j["max_p"] = c.max_p;
  if (c.subcommand == Subcommand::simulate) {
    j["setting"] = c.setting;
    j["base"] = c.base;
    j["n"] = c.n;
    j["reps"] = c.reps;
    j["coverage"] = c.coverage;
    j["eval_size"] = c.eval_size;
    j["truth_draws"] = c.truth_draws;
    j["local_s"] = c.local_s;
  }
  j["threads"] = c.threads;
  return j;
}

ProximalConfig prox_config(const RunConfig& c) {
  ProximalConfig p;
  p.alpha0 = c.alpha0;
  p.gamma = c.gamma;
  p.max_iterations = c.max_iterations;
  p.step_tolerance = c.tolerance;
  p.mode = optimizer_mode_from_name(c.mode);
  return p;
}

BootstrapConfig boot_config(const RunConfig& c) {
  BootstrapConfig b;
  b.replicates = c.replicates_b;
  b.alpha = c.alpha;
  b.weights = weight_family_from_name(c.weights);
  b.warm_start = c.warm_start;
  b.seed = c.seed;
  b.threads = c.threads;
  b.validate();
  return b;
}

Dataset load_input(const RunConfig& c) {
  if (c.input.empty()) throw ValidationError("cli: --input is required");
  if (c.covariates.empty()) throw ValidationError("cli: --covariates is required");
  CsvColumns cols;
  cols.outcome = c.outcome;
  cols.treatment = c.treatment;
  cols.covariates = c.covariates;
  cols.add_intercept = c.add_intercept;
  cols.anchor = c.anchor.empty() ? c.covariates.front() : c.anchor;
  return load_csv(c.input, cols);
}

struct Propensity {
  Eigen::VectorXd values;
  LogisticModel model;
  std::vector<std::string> columns;
};

std::optional<Propensity> fit_propensity(const RunConfig& c, const Dataset& data) {
  if (!c.observational) return std::nullopt;
  std::vector<Eigen::Index> idx;
  Propensity p;
  if (data.has_intercept()) {
    idx.push_back(0);
    p.columns.push_back(kInterceptName);
  }
  const auto& names = c.propensity_covariates.empty() ? c.covariates : c.propensity_covariates;
  for (const auto& name : names) {
    const auto j = data.column_index(name);
    if (j == 0 && data.has_intercept()) continue;
    idx.push_back(j);
    p.columns.push_back(name);
  }
  Eigen::MatrixXd design(data.size(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) design.col(static_cast<Eigen::Index>(k)) = data.covariates().col(idx[k]);
  p.model = fit_logistic(design, data.treatment());
  p.values = predict_propensity(p.model, design);
  return p;
}

json estimate_json(const Dataset& data, const RegimeEstimate& est) {
  json j;
  j["columns"] = data.column_names();
  j["beta"] = vec(est.beta);
  j["beta_raw"] = vec(est.beta_raw);
  j["anchor"] = data.column_names()[static_cast<std::size_t>(est.anchor_index)];
  j["h"] = num(est.bandwidth);
  j["objective"] = num(est.objective);
  j["value"] = num(est.sample_value);
  j["iterations"] = est.iterations;
  j["converged"] = est.converged;
  j["stop"] = std::string(to_string(est.stop));
  j["mode_used"] = std::string(to_string(est.mode_used));
  return j;
}

void add_propensity(json& doc, const std::optional<Propensity>& p) {
  if (!p) return;
  doc["propensity_model"] = {{"columns", p->columns},
                             {"coefficients", vec(p->model.coefficients)},
                             {"iterations", p->model.iterations}};
}

json interval_json(const Interval& iv) { return {{"lo", num(iv.lo)}, {"hi", num(iv.hi)}}; }

json run_estimate(const RunConfig& c) {
  const auto data = load_input(c);
  const auto propensity = fit_propensity(c, data);
  EstimateOptions options;
  if (propensity) options.propensity = propensity->values;
  const auto est = estimate_regime(data, SmoothingKernel::from_name(c.kernel), prox_config(c), options);
  json doc = estimate_json(data, est);
  add_propensity(doc, propensity);
  return doc;
}

json run_bootstrap_command(const RunConfig& c) {
  const auto boot = boot_config(c);
  const auto data = load_input(c);
  const auto propensity = fit_propensity(c, data);
  std::optional<Eigen::VectorXd> pi;
  if (propensity) pi = propensity->values;
  const auto result = run_bootstrap(data, SmoothingKernel::from_name(c.kernel), prox_config(c), boot, pi);
  json doc = estimate_json(data, result.base);
  add_propensity(doc, propensity);
  json intervals = json::array();
  for (std::size_t j = 0; j < result.intervals.size(); ++j) {
    json iv = interval_json(result.intervals[j]);
    iv["name"] = data.column_names()[j];
    intervals.push_back(std::move(iv));
  }
  doc["coefficient_intervals"] = std::move(intervals);
  doc["value_interval"] = interval_json(result.value_interval);
  doc["B"] = result.requested_replicates;
  doc["failed"] = result.failed_replicates;
  return doc;
}

json run_oracle(const RunConfig& c) {
  const auto data = load_input(c);
  OracleLimits limits;
  limits.max_n = c.max_n;
  limits.max_p = c.max_p;
  const auto result = exact_nonsmooth_argmax(data, limits);
  const auto constants = constant_policy_values(data);
  json doc;
  doc["columns"] = data.column_names();
  doc["beta"] = vec(result.beta);
  doc["normalized"] = result.normalized;
  doc["value"] = num(result.value);
  doc["sample_value"] = num(value_estimate(data, result.beta));
  doc["candidates"] = result.candidates;
  doc["constant_policies"] = {{"treat_all", num(constants.treat_all)},
                              {"treat_none", num(constants.treat_none)},
                              {"randomized", num(constants.randomized)}};
  return doc;
}

SimulationSpec simulation_spec(const RunConfig& c) {
  SimulationSpec spec;
  spec.setting = setting_from_name(c.setting);
  spec.base = setting_from_name(c.base);
  if (c.observational && spec.setting != Setting::observational) {
    spec.base = spec.setting;
    spec.setting = Setting::observational;
  }
  spec.n = c.n;
  spec.replicates = c.reps;
  spec.kernel = SmoothingKernel::from_name(c.kernel);
  spec.prox = prox_config(c);
  spec.seed = c.seed;
  spec.eval_sample_size = c.eval_size;
  spec.truth_draws = c.truth_draws;
  spec.threads = c.threads;
  if (!c.local_s.empty()) spec.local_s = Eigen::Map<const Eigen::VectorXd>(c.local_s.data(), static_cast<Eigen::Index>(c.local_s.size()));
  if (c.coverage) {
    auto boot = boot_config(c);
    boot.threads = 1;  // replicates are already parallel
    spec.bootstrap = boot;
  }
  spec.validate();
  return spec;
}

json metrics_json(const StudyMetrics& m) {
  json j;
  j["setting"] = std::string(to_string(m.setting));
  j["n"] = m.n;
  j["replicates"] = m.replicates;
  j["failed_replicates"] = m.failed_replicates;
  j["columns"] = m.coefficient_names;
  j["true_beta"] = vec(m.true_beta);
  j["bias"] = vec(m.bias);
  j["sd"] = vec(m.sd);
  j["match_ratio"] = num(m.match_ratio);
  j["true_value"] = num(m.true_value);
  j["random_policy_value"] = num(m.random_policy_value);
  j["value_bias"] = num(m.value_bias);
  j["value_sd"] = num(m.value_sd);
  if (m.has_coverage) {
    j["bootstrap_replicates"] = m.bootstrap_replicates;
    j["coverage"] = vec(m.coverage);
    j["mean_length"] = vec(m.mean_length);
    j["value_coverage"] = num(m.value_coverage);
    j["value_mean_length"] = num(m.value_mean_length);
    j["random_policy_coverage"] = num(m.random_policy_coverage);
  }
  return j;
}

void append_csv_row(const std::filesystem::path& path, const StudyMetrics& m) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw ValidationError("cli: cannot open '" + path.string() + "' for writing");
  const auto p = m.true_beta.size();
  if (fresh) {
    out << "setting,n,replicates,failed";
    for (Eigen::Index j = 0; j < p; ++j) out << ",bias_" << j;
    for (Eigen::Index j = 0; j < p; ++j) out << ",sd_" << j;
    out << ",match_ratio,true_value,value_bias,value_sd";
    for (Eigen::Index j = 0; j < p; ++j) out << ",coverage_" << j;
    for (Eigen::Index j = 0; j < p; ++j) out << ",length_" << j;
    out << ",value_coverage,random_policy_coverage,wall_seconds\n";
  }
  out << std::setprecision(12) << to_string(m.setting) << ',' << m.n << ',' << m.replicates << ','
      << m.failed_replicates;
  for (Eigen::Index j = 0; j < p; ++j) out << ',' << m.bias[j];
  for (Eigen::Index j = 0; j < p; ++j) out << ',' << m.sd[j];
  out << ',' << m.match_ratio << ',' << m.true_value << ',' << m.value_bias << ',' << m.value_sd;
  for (Eigen::Index j = 0; j < p; ++j) out << ',' << (m.has_coverage ? m.coverage[j] : NAN);
  for (Eigen::Index j = 0; j < p; ++j) out << ',' << (m.has_coverage ? m.mean_length[j] : NAN);
  out << ',' << (m.has_coverage ? m.value_coverage : NAN) << ','
      << (m.has_coverage ? m.random_policy_coverage : NAN) << ',' << m.wall_seconds << '\n';
}

json run_simulate(const RunConfig& c, std::ostream& err) {
  const auto spec = simulation_spec(c);
  const auto metrics = spec.bootstrap ? run_coverage_study(spec) : run_estimation_study(spec);
  err << "simulate: " << to_string(metrics.setting) << " n=" << metrics.n << " reps=" << metrics.replicates
      << " finished in " << metrics.wall_seconds << " s\n";
  if (!c.csv_output.empty()) append_csv_row(c.csv_output, metrics);
  return metrics_json(metrics);
}

void emit(const json& doc, const RunConfig& c, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (c.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.output, std::ios::binary | std::ios::trunc);
  if (!file) throw ValidationError("cli: cannot open '" + c.output.string() + "' for writing");
  file << text;
}

void add_input_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--input,-i", c.input, "CSV file with a header row")->required();
  sub.add_option("--outcome", c.outcome, "Outcome column")->capture_default_str();
  sub.add_option("--treatment", c.treatment, "0/1 treatment column")->capture_default_str();
  sub.add_option("--covariates", c.covariates, "Covariate columns, comma separated")->delimiter(',')->required();
  sub.add_option("--anchor", c.anchor, "Covariate whose coefficient is normalized to ±1 (default: first)");
  sub.add_flag("!--no-intercept", c.add_intercept, "Do not prepend an intercept column");
}

void add_fit_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--kernel", c.kernel, "gaussian | poly7")->capture_default_str();
  sub.add_option("--mode", c.mode, "full | fixed")->capture_default_str();
  sub.add_option("--alpha0", c.alpha0, "Initial proximal curvature")->capture_default_str();
  sub.add_option("--gamma", c.gamma, "Curvature expansion factor (> 1)")->capture_default_str();
  sub.add_option("--max-iter", c.max_iterations, "Iteration cap")->capture_default_str();
  sub.add_option("--tol", c.tolerance, "Stop when the step norm falls below this")->capture_default_str();
}

void add_bootstrap_options(CLI::App& sub, RunConfig& c) {
  sub.add_option("--B", c.replicates_b, "Bootstrap replicates")->capture_default_str();
  sub.add_option("--alpha", c.alpha, "Interval level is 1 - alpha")->capture_default_str();
  sub.add_option("--weights", c.weights, "exp | lognormal")->capture_default_str();
  sub.add_flag("--warm-start", c.warm_start, "Start replicates at the base estimate");
}

void add_propensity_options(CLI::App& sub, RunConfig& c) {
  sub.add_flag("--observational", c.observational, "Fit a logistic propensity model and use the IPW objective");
  sub.add_option("--propensity-covariates", c.propensity_covariates,
                 "Propensity model covariates, comma separated (default: all)")
      ->delimiter(',');
}

}  // namespace

ParseOutcome parse_arguments(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::optional<unsigned> threads;
  CLI::App app{"Optimal treatment regime estimation with a smoothed value objective", "otr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "otr 0.1.0");

  auto* estimate = app.add_subcommand("estimate", "Fit the regime on a CSV sample");
  add_input_options(*estimate, c);
  add_fit_options(*estimate, c);
  add_propensity_options(*estimate, c);

  auto* bootstrap = app.add_subcommand("bootstrap", "Fit plus weighted-bootstrap intervals");
  add_input_options(*bootstrap, c);
  add_fit_options(*bootstrap, c);
  add_bootstrap_options(*bootstrap, c);
  add_propensity_options(*bootstrap, c);

  auto* oracle = app.add_subcommand("oracle", "Exact maximizer of the nonsmooth objective (small n, p)");
  add_input_options(*oracle, c);
  oracle->add_option("--max-n", c.max_n, "Largest n the enumeration accepts")->capture_default_str();
  oracle->add_option("--max-p", c.max_p, "Largest p the enumeration accepts")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study on a generative setting");
  simulate->add_option("--setting", c.setting, "s1..s5 | binary | observational | local")->capture_default_str();
  simulate->add_option("--base", c.base, "Parameter source for binary/observational/local (s1 | s2)")
      ->capture_default_str();
  simulate->add_option("--n", c.n, "Sample size per replicate")->capture_default_str();
  simulate->add_option("--reps", c.reps, "Replicates")->capture_default_str();
  simulate->add_flag("--coverage", c.coverage, "Bootstrap every replicate and report interval coverage");
  simulate->add_option("--eval-size", c.eval_size, "Fresh draws for the match ratio")->capture_default_str();
  simulate->add_option("--truth-draws", c.truth_draws, "Monte Carlo draws for true values")->capture_default_str();
  simulate->add_option("--local-s", c.local_s, "Local direction s (4 values, s[1] = 0)")->delimiter(',');
  simulate->add_option("--csv", c.csv_output, "Append a summary row (with wall time) to this CSV");
  add_fit_options(*simulate, c);
  add_bootstrap_options(*simulate, c);
  simulate->add_flag("--observational", c.observational, "Observational variant of the setting");

  for (auto* sub : {estimate, bootstrap, oracle, simulate}) {
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--out,-o", c.output, "Write JSON here instead of stdout");
    sub->add_option("--threads", threads, "Worker threads (default: OTR_THREADS, else all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? 0 : 1};
  }
  if (*estimate) c.subcommand = Subcommand::estimate;
  if (*bootstrap) c.subcommand = Subcommand::bootstrap;
  if (*oracle) c.subcommand = Subcommand::oracle;
  if (*simulate) c.subcommand = Subcommand::simulate;
  c.threads = resolve_threads(threads);
  return {c, 0};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    json doc;
    doc["command"] = to_string(config.subcommand);
    doc["config"] = config_json(config);
    json body;
    switch (config.subcommand) {
      case Subcommand::estimate: body = run_estimate(config); break;
      case Subcommand::bootstrap: body = run_bootstrap_command(config); break;
      case Subcommand::oracle: body = run_oracle(config); break;
      case Subcommand::simulate: body = run_simulate(config, err); break;
    }
    for (auto& [key, value] : body.items()) doc[key] = value;
    emit(doc, config, out);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto parsed = parse_arguments(argc, argv, out, err);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

}  // namespace otr::cli
