#include "otr/simulate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "otr/error.hpp"
#include "otr/objective.hpp"
#include "otr/parallel.hpp"
#include "otr/propensity.hpp"

namespace otr {

namespace {

const Eigen::Vector4d kOutcomeEta{-1.0, -0.5, 0.5, -0.5};
const Eigen::Vector4d kObservationalEta{0.2, 0.5, 0.5, 0.5};

Setting parameter_setting(const SimulationSpec& spec) {
  switch (spec.setting) {
    case Setting::binary:
    case Setting::observational:
    case Setting::local:
      return spec.base;
    default:
      return spec.setting;
  }
}

Eigen::VectorXd setting_beta(Setting setting) {
  switch (setting) {
    case Setting::s1: return Eigen::Vector4d{-2.0, -2.0, 2.0, 2.0};
    case Setting::s2: return Eigen::Vector4d{-2.0, -2.0, 2.0, 0.0};
    case Setting::s3: return Eigen::Vector4d{1.0, 2.0, 0.02, 0.0};
    case Setting::s4:
    case Setting::s5: return Eigen::Vector4d{-1.0, 1.0, 0.0, 0.0};
    default: break;
  }
  throw ValidationError("simulate: setting has no direct parameter vector");
}

// Local-alternative scale bₙ = (n hₙ)^(-1/2), hₙ from the bandwidth rule with
// the population standard deviation of xᵀβ₀ (x̃ standard normal).
double local_scale(const SimulationSpec& spec, const Eigen::VectorXd& beta0) {
  const double index_sd = beta0.tail(beta0.size() - 1).norm();
  const double h = 0.9 * std::pow(static_cast<double>(spec.n), spec.kernel.bandwidth_exponent()) * index_sd;
  return 1.0 / std::sqrt(static_cast<double>(spec.n) * h);
}

Eigen::VectorXd local_direction(const SimulationSpec& spec) {
  return spec.local_s.value_or(Eigen::Vector4d{1.0, 0.0, 1.0, 1.0});
}

// Noise-free potential-outcome means μ₀(x), μ₁(x).
std::pair<double, double> outcome_means(const SimulationSpec& spec, const Eigen::VectorXd& effect,
                                        const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const double baseline = x.dot(kOutcomeEta.transpose());
  const double contrast = x.dot(effect.transpose());
  if (spec.setting == Setting::binary) return {expit(baseline), expit(baseline + contrast)};
  const double mu0 = std::exp(baseline);
  return {mu0, mu0 + contrast};
}

double mean(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return v.empty() ? 0.0 : total / static_cast<double>(v.size());
}

double sd(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<std::string> simulation_columns() { return {kInterceptName, "x1", "x2", "x3"}; }

}  // namespace

std::string_view to_string(Setting setting) noexcept {
  switch (setting) {
    case Setting::s1: return "s1";
    case Setting::s2: return "s2";
    case Setting::s3: return "s3";
    case Setting::s4: return "s4";
    case Setting::s5: return "s5";
    case Setting::binary: return "binary";
    case Setting::observational: return "observational";
    case Setting::local: return "local";
  }
  return "unknown";
}

Setting setting_from_name(std::string_view name) {
  for (auto s : {Setting::s1, Setting::s2, Setting::s3, Setting::s4, Setting::s5, Setting::binary,
                 Setting::observational, Setting::local}) {
    if (name == to_string(s)) return s;
  }
  throw ValidationError("simulate: unknown setting '" + std::string(name) +
                        "' (expected s1..s5, binary, observational, local)");
}

void SimulationSpec::validate() const {
  if (n < 2) throw ValidationError("simulate: n must be at least 2");
  if (replicates < 1) throw ValidationError("simulate: replicates must be at least 1");
  if (eval_sample_size < 1) throw ValidationError("simulate: eval sample size must be positive");
  if (truth_draws < 10000) throw ValidationError("simulate: at least 10^4 Monte Carlo draws required");
  if (setting == Setting::binary || setting == Setting::observational || setting == Setting::local) {
    if (base != Setting::s1 && base != Setting::s2) {
      throw ValidationError("simulate: base setting must be s1 or s2");
    }
  }
  if (local_s) {
    if (local_s->size() != 4) throw ValidationError("simulate: local direction s must have 4 entries");
    if ((*local_s)[kSimulationAnchor] != 0.0) {
      throw ValidationError("simulate: local direction s must be zero at the anchor (x1)");
    }
  }
  if (bootstrap) bootstrap->validate();
}

Eigen::VectorXd generative_beta(const SimulationSpec& spec) {
  if (spec.setting == Setting::local) {
    SimulationSpec base_spec;
    base_spec.setting = spec.base;
    const Eigen::VectorXd beta0 = true_beta_opt(base_spec);
    return beta0 + local_scale(spec, beta0) * local_direction(spec);
  }
  return setting_beta(parameter_setting(spec));
}

Eigen::VectorXd true_beta_opt(const SimulationSpec& spec) {
  const Eigen::VectorXd beta = generative_beta(spec);
  return beta / std::abs(beta[kSimulationAnchor]);
}

Eigen::MatrixXd draw_covariates(const SimulationSpec& spec, Eigen::Index count, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(count, 4);
  const Setting s = parameter_setting(spec);
  std::uniform_int_distribution<int> four_levels(-1, 2);
  std::uniform_int_distribution<int> two_levels(1, 2);
  for (Eigen::Index i = 0; i < count; ++i) {
    x(i, 0) = 1.0;
    const double z1 = normal(rng);
    x(i, 2) = normal(rng);
    x(i, 3) = normal(rng);
    if (s == Setting::s4) {
      x(i, 1) = four_levels(rng);
    } else if (s == Setting::s5) {
      x(i, 1) = two_levels(rng);
    } else {
      x(i, 1) = z1;
    }
  }
  return x;
}

GeneratedSample generate_dataset(const SimulationSpec& spec, Rng& rng) {
  const auto n = spec.n;
  Eigen::MatrixXd x = draw_covariates(spec, n, rng);
  const Eigen::VectorXd effect = generative_beta(spec);
  Eigen::VectorXd a(n);
  Eigen::VectorXd y(n);
  std::normal_distribution<double> noise;
  std::uniform_real_distribution<double> unif;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p_treat = spec.setting == Setting::observational ? expit(x.row(i).dot(kObservationalEta.transpose()))
                                                                  : 0.5;
    a[i] = unif(rng) < p_treat ? 1.0 : 0.0;
    const auto [mu0, mu1] = outcome_means(spec, effect, x.row(i));
    const double mu = a[i] == 1.0 ? mu1 : mu0;
    if (spec.setting == Setting::binary) {
      y[i] = unif(rng) < mu ? 1.0 : 0.0;
    } else {
      y[i] = mu + noise(rng);
    }
  }
  return {Dataset(std::move(x), std::move(a), std::move(y), simulation_columns(), kSimulationAnchor, true),
          true_beta_opt(spec)};
}

double true_value_monte_carlo(const SimulationSpec& spec, const Eigen::VectorXd& beta, Eigen::Index draws, Rng& rng) {
  if (draws < 10000) throw ValidationError("simulate: at least 10^4 Monte Carlo draws required");
  if (beta.size() != 4) throw ValidationError("simulate: beta must have 4 entries");
  const Eigen::VectorXd effect = generative_beta(spec);
  constexpr Eigen::Index kChunk = 65536;
  double total = 0.0;
  for (Eigen::Index done = 0; done < draws; done += kChunk) {
    const auto m = std::min(kChunk, draws - done);
    const Eigen::MatrixXd x = draw_covariates(spec, m, rng);
    const Eigen::VectorXd z = x * beta;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto [mu0, mu1] = outcome_means(spec, effect, x.row(i));
      total += z[i] > 0.0 ? mu1 : mu0;
    }
  }
  return total / static_cast<double>(draws);
}

double random_policy_value_monte_carlo(const SimulationSpec& spec, Eigen::Index draws, Rng& rng) {
  if (draws < 10000) throw ValidationError("simulate: at least 10^4 Monte Carlo draws required");
  const Eigen::VectorXd effect = generative_beta(spec);
  constexpr Eigen::Index kChunk = 65536;
  double total = 0.0;
  for (Eigen::Index done = 0; done < draws; done += kChunk) {
    const auto m = std::min(kChunk, draws - done);
    const Eigen::MatrixXd x = draw_covariates(spec, m, rng);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto [mu0, mu1] = outcome_means(spec, effect, x.row(i));
      total += 0.5 * (mu0 + mu1);
    }
  }
  return total / static_cast<double>(draws);
}

double match_ratio(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true, const SimulationSpec& spec,
                   Rng& rng) {
  if (beta_hat.size() != 4 || beta_true.size() != 4) throw ValidationError("simulate: beta must have 4 entries");
  const Eigen::MatrixXd x = draw_covariates(spec, spec.eval_sample_size, rng);
  const Eigen::VectorXd zh = x * beta_hat;
  const Eigen::VectorXd zt = x * beta_true;
  Eigen::Index agree = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) agree += (zh[i] > 0.0) == (zt[i] > 0.0);
  return static_cast<double>(agree) / static_cast<double>(x.rows());
}

double boundary_mass(const SimulationSpec& spec, Eigen::Index draws, Rng& rng) {
  const Eigen::MatrixXd x = draw_covariates(spec, draws, rng);
  const Eigen::VectorXd z = x * generative_beta(spec);
  return static_cast<double>((z.array() == 0.0).count()) / static_cast<double>(draws);
}

RegimeEstimate estimate_for_setting(const SimulationSpec& spec, const Dataset& data) {
  EstimateOptions options;
  if (spec.setting == Setting::observational) {
    const auto model = fit_logistic(data.covariates(), data.treatment());
    options.propensity = predict_propensity(model, data.covariates());
  }
  return estimate_regime(data, spec.kernel, spec.prox, options);
}

namespace {

struct ReplicateRecord {
  bool ok = false;
  Eigen::VectorXd error;
  double match = 0.0;
  double value = 0.0;
  std::vector<bool> covered;
  std::vector<double> length;
  bool value_covered = false;
  bool random_covered = false;
  double value_length = 0.0;
};

StudyMetrics run_study(const SimulationSpec& spec, bool with_coverage) {
  spec.validate();
  if (with_coverage && !spec.bootstrap) throw ValidationError("simulate: coverage study requires a bootstrap config");
  if (!with_coverage && spec.bootstrap) {
    throw ValidationError("simulate: estimation study takes no bootstrap config");
  }
  const auto start = std::chrono::steady_clock::now();

  StudyMetrics metrics;
  metrics.setting = spec.setting;
  metrics.n = spec.n;
  metrics.replicates = spec.replicates;
  metrics.coefficient_names = simulation_columns();
  metrics.true_beta = true_beta_opt(spec);
  {
    auto rng = make_stream(spec.seed, {stream_tag::truth, 0});
    metrics.true_value = true_value_monte_carlo(spec, metrics.true_beta, spec.truth_draws, rng);
    auto rng_random = make_stream(spec.seed, {stream_tag::truth, 1});
    metrics.random_policy_value = random_policy_value_monte_carlo(spec, spec.truth_draws, rng_random);
  }

  std::vector<ReplicateRecord> records(static_cast<std::size_t>(spec.replicates));
  const unsigned threads = spec.threads == 0 ? resolve_threads() : spec.threads;
  parallel_for(records.size(), threads, [&](std::size_t r) {
    auto& rec = records[r];
    auto data_rng = make_stream(spec.seed, {stream_tag::data, r});
    auto sample = generate_dataset(spec, data_rng);
    try {
      std::optional<Eigen::VectorXd> propensity;
      if (spec.setting == Setting::observational) {
        const auto model = fit_logistic(sample.data.covariates(), sample.data.treatment());
        propensity = predict_propensity(model, sample.data.covariates());
      }
      RegimeEstimate estimate;
      if (with_coverage) {
        BootstrapConfig boot = *spec.bootstrap;
        boot.seed = derive_seed(spec.seed, {stream_tag::bootstrap, r});
        boot.threads = 1;
        const auto result = run_bootstrap(sample.data, spec.kernel, spec.prox, boot, propensity);
        estimate = result.base;
        for (std::size_t j = 0; j < result.intervals.size(); ++j) {
          rec.covered.push_back(result.intervals[j].contains(metrics.true_beta[static_cast<Eigen::Index>(j)]));
          rec.length.push_back(result.intervals[j].length());
        }
        rec.value_covered = result.value_interval.contains(metrics.true_value);
        rec.random_covered = result.value_interval.contains(metrics.random_policy_value);
        rec.value_length = result.value_interval.length();
      } else {
        EstimateOptions options;
        options.propensity = propensity;
        estimate = estimate_regime(sample.data, spec.kernel, spec.prox, options);
      }
      rec.error = estimate.beta - sample.true_beta_opt;
      auto eval_rng = make_stream(spec.seed, {stream_tag::evaluation, r});
      rec.match = match_ratio(estimate.beta, sample.true_beta_opt, spec, eval_rng);
      rec.value = estimate.sample_value;
      rec.ok = true;
    } catch (const Error&) {
      rec.ok = false;
    }
  });

  std::vector<const ReplicateRecord*> good;
  for (const auto& rec : records) {
    if (rec.ok) good.push_back(&rec);
  }
  metrics.failed_replicates = spec.replicates - static_cast<int>(good.size());
  if (good.empty() || metrics.failed_replicates * 20 > spec.replicates) {
    throw NumericalError("simulate: " + std::to_string(metrics.failed_replicates) + " of " +
                         std::to_string(spec.replicates) + " replicates failed (limit 5%)");
  }

  const Eigen::Index p = metrics.true_beta.size();
  metrics.bias.resize(p);
  metrics.sd.resize(p);
  metrics.sd_defined = good.size() >= 2;
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> column;
    for (auto* rec : good) column.push_back(rec->error[j]);
    metrics.bias[j] = mean(column);
    metrics.sd[j] = sd(column);
  }
  std::vector<double> matches, values;
  for (auto* rec : good) {
    matches.push_back(rec->match);
    values.push_back(rec->value - metrics.true_value);
  }
  metrics.match_ratio = mean(matches);
  metrics.value_bias = mean(values);
  metrics.value_sd = sd(values);

  if (with_coverage) {
    metrics.has_coverage = true;
    metrics.bootstrap_replicates = spec.bootstrap->replicates;
    metrics.coverage = Eigen::VectorXd::Zero(p);
    metrics.mean_length = Eigen::VectorXd::Zero(p);
    const double count = static_cast<double>(good.size());
    for (auto* rec : good) {
      for (Eigen::Index j = 0; j < p; ++j) {
        metrics.coverage[j] += rec->covered[static_cast<std::size_t>(j)] ? 1.0 / count : 0.0;
        metrics.mean_length[j] += rec->length[static_cast<std::size_t>(j)] / count;
      }
      metrics.value_coverage += rec->value_covered ? 1.0 / count : 0.0;
      metrics.random_policy_coverage += rec->random_covered ? 1.0 / count : 0.0;
      metrics.value_mean_length += rec->value_length / count;
    }
  }
  metrics.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return metrics;
}

}  // namespace

StudyMetrics run_estimation_study(const SimulationSpec& spec) { return run_study(spec, false); }

StudyMetrics run_coverage_study(const SimulationSpec& spec) { return run_study(spec, true); }

}  // namespace otr
