#include "otr/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "otr/error.hpp"
#include "otr/quantile.hpp"

namespace otr {

namespace {

void check_beta(const Dataset& data, const Eigen::VectorXd& beta) {
  if (beta.size() != data.dimension()) {
    throw ValidationError("objective: beta has " + std::to_string(beta.size()) + " entries, data has " +
                          std::to_string(data.dimension()) + " covariates");
  }
  if (!beta.allFinite()) throw ValidationError("objective: beta contains non-finite entries");
}

void check_unit_vector(const Dataset& data, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != data.size()) {
    throw ValidationError(std::string("objective: ") + what + " has " + std::to_string(v.size()) +
                          " entries, data has " + std::to_string(data.size()) + " observations");
  }
}

// Aᵢπ̂ᵢ + (1-Aᵢ)(1-π̂ᵢ)
double arm_probability(double treated, double propensity) {
  return treated * propensity + (1.0 - treated) * (1.0 - propensity);
}

}  // namespace

Eigen::VectorXd clip_propensity(Eigen::VectorXd propensity) {
  for (auto& p : propensity) {
    if (!std::isfinite(p)) throw ValidationError("objective: non-finite propensity");
    p = std::clamp(p, kPropensityFloor, 1.0 - kPropensityFloor);
  }
  return propensity;
}

ObjectiveContext::ObjectiveContext(const Dataset& data, SmoothingKernel kernel, double bandwidth,
                                   std::optional<Eigen::VectorXd> unit_weights,
                                   std::optional<Eigen::VectorXd> propensity)
    : data_(&data), kernel_(kernel), bandwidth_(bandwidth), weights_(std::move(unit_weights)) {
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
    throw ValidationError("objective: bandwidth must be positive and finite, got " + std::to_string(bandwidth_));
  }
  const auto n = data.size();
  if (weights_) {
    check_unit_vector(data, *weights_, "unit_weights");
    for (double r : *weights_) {
      if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("objective: unit weights must be positive and finite");
    }
  }
  if (propensity) {
    check_unit_vector(data, *propensity, "propensity");
    propensity_ = clip_propensity(std::move(*propensity));
  }

  const auto& a = data.treatment();
  const auto& y = data.outcome();
  const double inv_n = 1.0 / static_cast<double>(n);
  coefficients_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = weights_ ? (*weights_)[i] : 1.0;
    const double sign = 2.0 * a[i] - 1.0;
    if (propensity_) {
      const double scale = r * y[i] * inv_n / arm_probability(a[i], (*propensity_)[i]);
      coefficients_[i] = sign * scale;
      offset_ += (1.0 - a[i]) * scale;
    } else {
      coefficients_[i] = 2.0 * inv_n * r * sign * y[i];
    }
  }
}

double smoothed_objective(const ObjectiveContext& ctx, const Eigen::VectorXd& beta) {
  check_beta(ctx.data(), beta);
  const Eigen::VectorXd z = ctx.data().covariates() * beta / ctx.bandwidth();
  const auto& c = ctx.unit_coefficients();
  const auto& kernel = ctx.kernel();
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += c[i] * kernel.value_unchecked(z[i]);
  return ctx.offset() + total;
}

ObjectiveEvaluation evaluate_objective(const ObjectiveContext& ctx, const Eigen::VectorXd& beta) {
  check_beta(ctx.data(), beta);
  const auto& x = ctx.data().covariates();
  const double h = ctx.bandwidth();
  const Eigen::VectorXd z = x * beta / h;
  const auto& c = ctx.unit_coefficients();
  const auto& kernel = ctx.kernel();
  Eigen::VectorXd slope_weights(z.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += c[i] * kernel.value_unchecked(z[i]);
    slope_weights[i] = c[i] * kernel.slope_unchecked(z[i]);
  }
  return {ctx.offset() + total, x.transpose() * slope_weights / h};
}

Eigen::VectorXd smoothed_gradient(const ObjectiveContext& ctx, const Eigen::VectorXd& beta) {
  check_beta(ctx.data(), beta);
  const auto& x = ctx.data().covariates();
  const double h = ctx.bandwidth();
  const Eigen::VectorXd z = x * beta / h;
  const auto& c = ctx.unit_coefficients();
  Eigen::VectorXd slope_weights(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) slope_weights[i] = c[i] * ctx.kernel().slope_unchecked(z[i]);
  return x.transpose() * slope_weights / h;
}

Eigen::MatrixXd smoothed_hessian(const ObjectiveContext& ctx, const Eigen::VectorXd& beta) {
  check_beta(ctx.data(), beta);
  const auto& x = ctx.data().covariates();
  const double h = ctx.bandwidth();
  const Eigen::VectorXd z = x * beta / h;
  const auto& c = ctx.unit_coefficients();
  Eigen::VectorXd curvature_weights(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    curvature_weights[i] = c[i] * ctx.kernel().curvature_unchecked(z[i]);
  }
  Eigen::MatrixXd hessian = x.transpose() * curvature_weights.asDiagonal() * x / (h * h);
  return 0.5 * (hessian + hessian.transpose());
}

double nonsmooth_objective(const Dataset& data, const Eigen::VectorXd& beta) {
  check_beta(data, beta);
  const Eigen::VectorXd z = data.covariates() * beta;
  const auto& a = data.treatment();
  const auto& y = data.outcome();
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) total += (2.0 * a[i] - 1.0) * y[i];
  }
  return 2.0 * total / static_cast<double>(data.size());
}

double value_estimate(const Dataset& data, const Eigen::VectorXd& beta,
                      const std::optional<Eigen::VectorXd>& unit_weights,
                      const std::optional<Eigen::VectorXd>& propensity) {
  check_beta(data, beta);
  if (unit_weights) check_unit_vector(data, *unit_weights, "unit_weights");
  std::optional<Eigen::VectorXd> clipped;
  if (propensity) {
    check_unit_vector(data, *propensity, "propensity");
    clipped = clip_propensity(*propensity);
  }
  const Eigen::VectorXd z = data.covariates() * beta;
  const auto& a = data.treatment();
  const auto& y = data.outcome();
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const bool treat = z[i] > 0.0;
    const bool follows = (a[i] == 1.0) == treat;
    if (!follows) continue;
    const double r = unit_weights ? (*unit_weights)[i] : 1.0;
    total += clipped ? r * y[i] / arm_probability(a[i], (*clipped)[i]) : 2.0 * r * y[i];
  }
  return total / static_cast<double>(data.size());
}

Eigen::VectorXd pilot_direction(const Dataset& data, const std::optional<Eigen::VectorXd>& propensity) {
  const auto n = data.size();
  const auto& a = data.treatment();
  const auto& y = data.outcome();
  std::optional<Eigen::VectorXd> clipped;
  if (propensity) {
    check_unit_vector(data, *propensity, "propensity");
    clipped = clip_propensity(*propensity);
  }
  Eigen::VectorXd response(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = 2.0 * a[i] - 1.0;
    response[i] = clipped ? sign * y[i] / arm_probability(a[i], (*clipped)[i]) : 2.0 * sign * y[i];
  }
  return data.covariates().colPivHouseholderQr().solve(response);
}

double select_bandwidth(const Dataset& data, const SmoothingKernel& kernel, const Eigen::VectorXd& pilot) {
  if (pilot.size() != data.dimension()) {
    throw ValidationError("objective: pilot direction has " + std::to_string(pilot.size()) +
                          " entries, data has " + std::to_string(data.dimension()) + " covariates");
  }
  const auto n = static_cast<double>(data.size());
  const double rate = 0.9 * std::pow(n, kernel.bandwidth_exponent());

  std::vector<double> z(static_cast<std::size_t>(data.size()));
  Eigen::Map<Eigen::VectorXd>(z.data(), data.size()) = data.covariates() * pilot;
  const double sd = pilot.allFinite() ? sample_sd(z) : 0.0;
  if (sd > 0.0 && std::isfinite(sd)) {
    const double spread = std::min(sd, interquartile_range(std::move(z)) / 1.34);
    return std::max(rate * spread, 1e-6);
  }

  const auto anchor = data.covariates().col(data.anchor_index());
  std::vector<double> anchor_values(anchor.data(), anchor.data() + anchor.size());
  const double anchor_sd = sample_sd(anchor_values);
  if (!(anchor_sd > 0.0)) {
    throw ValidationError("objective: cannot select a bandwidth; the pilot index and the anchor column are both constant");
  }
  return std::max(rate * anchor_sd, 1e-6);
}

}  // namespace otr
