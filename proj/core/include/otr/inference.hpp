#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "otr/optimizer.hpp"
#include "otr/quantile.hpp"
#include "otr/rng.hpp"

namespace otr {

// Bootstrap weight distributions. Both real families are positive with mean
// one and variance one; `unit` (every weight 1) is a diagnostic that must
// reproduce the base fit exactly.
enum class WeightFamily { exponential, lognormal, unit };

std::string_view to_string(WeightFamily family) noexcept;
WeightFamily weight_family_from_name(std::string_view name);

struct BootstrapConfig {
  int replicates = 500;
  WeightFamily weights = WeightFamily::exponential;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  // Start replicates at the base estimate instead of the base fit's initial
  // beta. Off by default: the shrinking proximal steps then cannot travel far
  // enough and the intervals under-cover.
  bool warm_start = false;
  // Workers for the replicate loop; 0 means resolve_threads().
  unsigned threads = 1;

  void validate() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
  double length() const noexcept { return hi - lo; }
};

struct BootstrapResult {
  // Rows are successful replicates in replicate order; columns are normalized
  // coefficients.
  Eigen::MatrixXd coefficient_draws;
  // √n (V*_n(β̂) - V_n(β̂)) per successful replicate.
  Eigen::VectorXd value_perturbations;
  RegimeEstimate base;
  std::vector<Interval> intervals;
  Interval value_interval;
  int requested_replicates = 0;
  int failed_replicates = 0;
};

Eigen::VectorXd draw_weights(Eigen::Index n, WeightFamily family, Rng& rng);

// Fits the unweighted base estimate, then one weighted refit per replicate.
// Replicate b draws its weights from make_stream(seed, {bootstrap, b}), so
// results do not depend on the worker count. Intervals are left empty; see
// run_bootstrap().
BootstrapResult bootstrap_replicates(const Dataset& data, const SmoothingKernel& kernel,
                                     const ProximalConfig& prox, const BootstrapConfig& boot,
                                     const std::optional<Eigen::VectorXd>& propensity = std::nullopt);

// Pivot intervals {β̃ⱼ - (nh)^(-1/2) ξⱼ^(1-α/2), β̃ⱼ - (nh)^(-1/2) ξⱼ^(α/2)} where
// ξⱼ are quantiles of √(nh)(β̃*ⱼ - β̃ⱼ). The anchor interval is the point β̃_anchor.
std::vector<Interval> coefficient_intervals(const Eigen::MatrixXd& draws, const RegimeEstimate& base,
                                            Eigen::Index n, double alpha);

// {V_n - n^(-1/2) d^(1-α/2), V_n - n^(-1/2) d^(α/2)}, d the perturbation quantiles.
Interval value_interval(const Eigen::VectorXd& perturbations, double base_value, Eigen::Index n, double alpha);

// bootstrap_replicates() followed by both interval constructions.
BootstrapResult run_bootstrap(const Dataset& data, const SmoothingKernel& kernel, const ProximalConfig& prox,
                              const BootstrapConfig& boot,
                              const std::optional<Eigen::VectorXd>& propensity = std::nullopt);

}  // namespace otr
