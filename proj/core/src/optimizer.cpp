#include "otr/optimizer.hpp"

#include <cmath>
#include <string>

#include "otr/error.hpp"

namespace otr {

std::string_view to_string(OptimizerMode mode) noexcept {
  return mode == OptimizerMode::full_vector ? "full-vector" : "fixed-anchor";
}

OptimizerMode optimizer_mode_from_name(std::string_view name) {
  if (name == "full" || name == "full-vector") return OptimizerMode::full_vector;
  if (name == "fixed" || name == "fixed-anchor") return OptimizerMode::fixed_anchor;
  throw ValidationError("optimizer: unknown mode '" + std::string(name) + "' (expected full or fixed)");
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::insufficient_increase: return "insufficient-increase";
    case StopReason::step_tolerance: return "step-tolerance";
    case StopReason::max_iterations: return "max-iterations";
  }
  return "unknown";
}

void ProximalConfig::validate(Eigen::Index dimension) const {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw ValidationError("optimizer: alpha0 must be positive");
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw ValidationError("optimizer: gamma must exceed 1");
  if (max_iterations < 1) throw ValidationError("optimizer: max_iterations must be at least 1");
  if (!(step_tolerance > 0.0)) throw ValidationError("optimizer: step tolerance must be positive");
  if (initial_beta) {
    if (initial_beta->size() != dimension) {
      throw ValidationError("optimizer: initial beta has " + std::to_string(initial_beta->size()) +
                            " entries, data has " + std::to_string(dimension) + " covariates");
    }
    if (!initial_beta->allFinite()) throw ValidationError("optimizer: initial beta is not finite");
  }
}

ProximalResult proximal_maximize(const ObjectiveContext& ctx, const ProximalConfig& config) {
  const auto p = ctx.data().dimension();
  config.validate(p);
  const auto anchor = ctx.data().anchor_index();
  const bool fixed = config.mode == OptimizerMode::fixed_anchor;

  ProximalResult result;
  Eigen::VectorXd beta = config.initial_beta.value_or(Eigen::VectorXd::Zero(p));
  auto current = evaluate_objective(ctx, beta);
  if (!std::isfinite(current.value)) {
    throw NumericalError("optimizer: non-finite objective at the initial beta");
  }
  result.trace.push_back(current.value);

  double alpha = config.alpha0;
  int t = 0;
  while (true) {
    if (t == config.max_iterations) {
      result.stop = StopReason::max_iterations;
      break;
    }
    ++t;
    alpha *= config.gamma;
    Eigen::VectorXd gradient = current.gradient;
    if (fixed) gradient[anchor] = 0.0;
    const Eigen::VectorXd delta = gradient / (2.0 * alpha);
    const Eigen::VectorXd candidate = beta + delta;
    if (!candidate.allFinite()) {
      throw NumericalError("optimizer: non-finite iterate at iteration " + std::to_string(t));
    }
    auto next = evaluate_objective(ctx, candidate);
    if (!std::isfinite(next.value) || !next.gradient.allFinite()) {
      throw NumericalError("optimizer: non-finite objective at iteration " + std::to_string(t));
    }
    const double step2 = delta.squaredNorm();
    const double diff = next.value - current.value - gradient.dot(delta) + alpha * step2;
    if (diff < 0.0) {
      result.stop = StopReason::insufficient_increase;
      result.rejected_step = delta;
      break;
    }
    beta = candidate;
    current = std::move(next);
    result.trace.push_back(current.value);
    if (std::sqrt(step2) < config.step_tolerance) {
      result.stop = StopReason::step_tolerance;
      break;
    }
  }
  result.beta = std::move(beta);
  result.objective = current.value;
  result.iterations = t;
  return result;
}

Eigen::VectorXd normalize_anchor(const Eigen::VectorXd& beta, Eigen::Index anchor, double epsilon) {
  if (anchor < 0 || anchor >= beta.size()) {
    throw ValidationError("optimizer: anchor index " + std::to_string(anchor) + " out of range");
  }
  const double scale = std::abs(beta[anchor]);
  if (!(scale > epsilon)) {
    throw DegenerateAnchorError("optimizer: anchor coefficient " + std::to_string(beta[anchor]) +
                                " is below " + std::to_string(epsilon) +
                                "; cannot normalize (use fixed-anchor mode)");
  }
  Eigen::VectorXd normalized = beta / scale;
  normalized[anchor] = beta[anchor] > 0.0 ? 1.0 : -1.0;
  return normalized;
}

namespace {

ProximalResult fixed_anchor_race(const ObjectiveContext& ctx, const ProximalConfig& config) {
  const auto anchor = ctx.data().anchor_index();
  ProximalConfig fixed = config;
  fixed.mode = OptimizerMode::fixed_anchor;
  Eigen::VectorXd start = config.initial_beta.value_or(Eigen::VectorXd::Zero(ctx.data().dimension()));

  std::optional<ProximalResult> best;
  for (double sign : {1.0, -1.0}) {
    start[anchor] = sign;
    fixed.initial_beta = start;
    auto run = proximal_maximize(ctx, fixed);
    if (!best || run.objective > best->objective) best = std::move(run);
  }
  return std::move(*best);
}

}  // namespace

RegimeEstimate estimate_regime(const Dataset& data, const SmoothingKernel& kernel,
                               const ProximalConfig& config, const EstimateOptions& options) {
  validate_for_estimation(data);
  config.validate(data.dimension());
  const auto anchor = data.anchor_index();

  double h = 0.0;
  if (options.bandwidth) {
    h = *options.bandwidth;
  } else {
    h = select_bandwidth(data, kernel, pilot_direction(data, options.propensity));
  }
  const ObjectiveContext ctx(data, kernel, h, options.unit_weights, options.propensity);

  RegimeEstimate estimate;
  estimate.anchor_index = anchor;
  estimate.bandwidth = h;

  ProximalResult run;
  const bool anchor_given = config.initial_beta && (*config.initial_beta)[anchor] != 0.0;
  if (config.mode == OptimizerMode::fixed_anchor) {
    run = anchor_given ? proximal_maximize(ctx, config) : fixed_anchor_race(ctx, config);
    estimate.mode_used = OptimizerMode::fixed_anchor;
  } else {
    run = proximal_maximize(ctx, config);
    estimate.mode_used = OptimizerMode::full_vector;
    try {
      estimate.beta = normalize_anchor(run.beta, anchor);
    } catch (const DegenerateAnchorError&) {
      run = fixed_anchor_race(ctx, config);
      estimate.mode_used = OptimizerMode::fixed_anchor;
    }
  }
  if (estimate.mode_used == OptimizerMode::fixed_anchor) estimate.beta = normalize_anchor(run.beta, anchor);

  estimate.beta_raw = run.beta;
  estimate.objective = run.objective;
  estimate.iterations = run.iterations;
  estimate.stop = run.stop;
  estimate.converged = run.converged();
  estimate.sample_value = value_estimate(data, estimate.beta, options.unit_weights, options.propensity);
  return estimate;
}

}  // namespace otr
