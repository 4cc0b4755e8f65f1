#include "otr/inference.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "otr/error.hpp"
#include "otr/parallel.hpp"

namespace otr {

std::string_view to_string(WeightFamily family) noexcept {
  switch (family) {
    case WeightFamily::exponential: return "exponential";
    case WeightFamily::lognormal: return "lognormal";
    case WeightFamily::unit: return "unit";
  }
  return "unknown";
}

WeightFamily weight_family_from_name(std::string_view name) {
  if (name == "exp" || name == "exponential") return WeightFamily::exponential;
  if (name == "lognormal") return WeightFamily::lognormal;
  if (name == "unit") return WeightFamily::unit;
  throw ValidationError("inference: unknown weight family '" + std::string(name) +
                        "' (expected exp or lognormal)");
}

void BootstrapConfig::validate() const {
  if (replicates < 2) {
    throw ValidationError("inference: insufficient replicates: B = " + std::to_string(replicates) +
                          ", at least 2 required");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("inference: alpha must lie in (0, 1)");
}

Eigen::VectorXd draw_weights(Eigen::Index n, WeightFamily family, Rng& rng) {
  if (n < 1) throw ValidationError("inference: weight vector length must be positive");
  Eigen::VectorXd r(n);
  switch (family) {
    case WeightFamily::exponential: {
      std::exponential_distribution<double> dist(1.0);
      for (auto& v : r) {
        do { v = dist(rng); } while (!(v > 0.0));
      }
      break;
    }
    case WeightFamily::lognormal: {
      // mean exp(μ + σ²/2) = 1 and variance (e^{σ²} - 1) = 1 give σ² = ln 2, μ = -ln 2 / 2.
      std::lognormal_distribution<double> dist(-0.5 * std::numbers::ln2, std::sqrt(std::numbers::ln2));
      for (auto& v : r) {
        do { v = dist(rng); } while (!(v > 0.0));
      }
      break;
    }
    case WeightFamily::unit:
      r.setOnes();
      break;
  }
  return r;
}

BootstrapResult bootstrap_replicates(const Dataset& data, const SmoothingKernel& kernel,
                                     const ProximalConfig& prox, const BootstrapConfig& boot,
                                     const std::optional<Eigen::VectorXd>& propensity) {
  boot.validate();
  BootstrapResult result;
  result.requested_replicates = boot.replicates;
  EstimateOptions base_options;
  base_options.propensity = propensity;
  result.base = estimate_regime(data, kernel, prox, base_options);
  const auto& base = result.base;

  const auto n = data.size();
  const auto p = data.dimension();
  const auto replicates = static_cast<std::size_t>(boot.replicates);
  const double root_n = std::sqrt(static_cast<double>(n));

  ProximalConfig replicate_prox = prox;
  if (boot.warm_start) replicate_prox.initial_beta = base.beta_raw;

  Eigen::MatrixXd draws(boot.replicates, p);
  Eigen::VectorXd perturbations(boot.replicates);
  std::vector<char> ok(replicates, 0);

  const unsigned threads = boot.threads == 0 ? resolve_threads() : boot.threads;
  parallel_for(replicates, threads, [&](std::size_t b) {
    auto rng = make_stream(boot.seed, {stream_tag::bootstrap, b});
    Eigen::VectorXd weights = draw_weights(n, boot.weights, rng);
    try {
      const auto fit = estimate_regime(data, kernel, replicate_prox,
                                       {.propensity = propensity, .unit_weights = weights,
                                        .bandwidth = base.bandwidth});
      const double perturbed = value_estimate(data, base.beta, weights, propensity);
      const auto row = static_cast<Eigen::Index>(b);
      draws.row(row) = fit.beta.transpose();
      perturbations[row] = root_n * (perturbed - base.sample_value);
      ok[b] = 1;
    } catch (const Error&) {
      ok[b] = 0;
    }
  });

  Eigen::Index kept = 0;
  for (std::size_t b = 0; b < replicates; ++b) kept += ok[b];
  result.failed_replicates = boot.replicates - static_cast<int>(kept);
  if (result.failed_replicates > boot.replicates / 5) {
    throw NumericalError("inference: " + std::to_string(result.failed_replicates) + " of " +
                         std::to_string(boot.replicates) + " bootstrap replicates failed (limit 20%)");
  }
  result.coefficient_draws.resize(kept, p);
  result.value_perturbations.resize(kept);
  Eigen::Index row = 0;
  for (std::size_t b = 0; b < replicates; ++b) {
    if (!ok[b]) continue;
    result.coefficient_draws.row(row) = draws.row(static_cast<Eigen::Index>(b));
    result.value_perturbations[row] = perturbations[static_cast<Eigen::Index>(b)];
    ++row;
  }
  return result;
}

std::vector<Interval> coefficient_intervals(const Eigen::MatrixXd& draws, const RegimeEstimate& base,
                                            Eigen::Index n, double alpha) {
  if (draws.rows() < 2) {
    throw ValidationError("inference: insufficient replicates: " + std::to_string(draws.rows()) +
                          " successful, at least 2 required");
  }
  if (draws.cols() != base.beta.size()) throw ValidationError("inference: draw and estimate dimensions differ");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("inference: alpha must lie in (0, 1)");
  const double scale = std::sqrt(static_cast<double>(n) * base.bandwidth);

  std::vector<Interval> intervals(static_cast<std::size_t>(draws.cols()));
  std::vector<double> pivots(static_cast<std::size_t>(draws.rows()));
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    const double center = base.beta[j];
    if (j == base.anchor_index) {
      intervals[static_cast<std::size_t>(j)] = {center, center};
      continue;
    }
    for (Eigen::Index b = 0; b < draws.rows(); ++b) {
      pivots[static_cast<std::size_t>(b)] = scale * (draws(b, j) - center);
    }
    const double upper = quantile_of(pivots, 1.0 - alpha / 2.0);
    const double lower = quantile_of(pivots, alpha / 2.0);
    intervals[static_cast<std::size_t>(j)] = {center - upper / scale, center - lower / scale};
  }
  return intervals;
}

Interval value_interval(const Eigen::VectorXd& perturbations, double base_value, Eigen::Index n, double alpha) {
  if (perturbations.size() < 2) {
    throw ValidationError("inference: insufficient replicates: " + std::to_string(perturbations.size()) +
                          " successful, at least 2 required");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("inference: alpha must lie in (0, 1)");
  std::vector<double> d(perturbations.data(), perturbations.data() + perturbations.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  return {base_value - quantile_of(d, 1.0 - alpha / 2.0) / root_n,
          base_value - quantile_of(d, alpha / 2.0) / root_n};
}

BootstrapResult run_bootstrap(const Dataset& data, const SmoothingKernel& kernel, const ProximalConfig& prox,
                              const BootstrapConfig& boot, const std::optional<Eigen::VectorXd>& propensity) {
  auto result = bootstrap_replicates(data, kernel, prox, boot, propensity);
  result.intervals = coefficient_intervals(result.coefficient_draws, result.base, data.size(), boot.alpha);
  result.value_interval = value_interval(result.value_perturbations, result.base.sample_value, data.size(),
                                         boot.alpha);
  return result;
}

}  // namespace otr
