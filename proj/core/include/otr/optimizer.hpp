#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

#include "otr/data.hpp"
#include "otr/kernels.hpp"
#include "otr/objective.hpp"

namespace otr {

enum class OptimizerMode { full_vector, fixed_anchor };

std::string_view to_string(OptimizerMode mode) noexcept;
OptimizerMode optimizer_mode_from_name(std::string_view name);

/// Settings for the proximal ascent. α is expanded by γ on every iteration, so
/// the step (2αₜ)⁻¹∇M̃ shrinks geometrically.
struct ProximalConfig {
  double alpha0 = 1.0;
  double gamma = 2.0;
  int max_iterations = 10000;
  double step_tolerance = 1e-10;
  OptimizerMode mode = OptimizerMode::full_vector;
  // Defaults to the zero vector.
  std::optional<Eigen::VectorXd> initial_beta;

  void validate(Eigen::Index dimension) const;
};

enum class StopReason { insufficient_increase, step_tolerance, max_iterations };

std::string_view to_string(StopReason reason) noexcept;

struct ProximalResult {
  Eigen::VectorXd beta;
  double objective = 0.0;
  // Objective at the start and after every accepted step.
  std::vector<double> trace;
  int iterations = 0;
  StopReason stop = StopReason::max_iterations;
  // δₜ of the step that failed the acceptance test, if the run ended that way.
  std::optional<Eigen::VectorXd> rejected_step;

  bool converged() const noexcept { return stop != StopReason::max_iterations; }
};

// Proximal gradient ascent on the smoothed objective:
//   αₜ = γ αₜ₋₁,  δₜ = ∇M̃(βₜ₋₁) / (2αₜ),  βₜ = βₜ₋₁ + δₜ.
// A step is accepted while
//   M̃(βₜ) - M̃(βₜ₋₁) - ⟨∇M̃(βₜ₋₁), δₜ⟩ + αₜ‖δₜ‖² >= 0;
// the first rejected step ends the run and its predecessor is returned.
// The run also ends after an accepted step with ‖δₜ‖ < step_tolerance, or
// after max_iterations. In fixed-anchor mode the anchor entry of δₜ is zero.
ProximalResult proximal_maximize(const ObjectiveContext& ctx, const ProximalConfig& config);

// beta / |beta[anchor]|. Throws DegenerateAnchorError if |beta[anchor]| <= epsilon.
Eigen::VectorXd normalize_anchor(const Eigen::VectorXd& beta, Eigen::Index anchor, double epsilon = 1e-8);

struct RegimeEstimate {
  Eigen::VectorXd beta_raw;
  Eigen::VectorXd beta;  // |beta[anchor]| == 1
  Eigen::Index anchor_index = 0;
  double bandwidth = 0.0;
  double objective = 0.0;
  double sample_value = 0.0;
  int iterations = 0;
  bool converged = false;
  StopReason stop = StopReason::max_iterations;
  OptimizerMode mode_used = OptimizerMode::full_vector;
};

struct EstimateOptions {
  std::optional<Eigen::VectorXd> propensity;
  std::optional<Eigen::VectorXd> unit_weights;
  // Skip bandwidth selection and use this h (bootstrap replicates reuse the
  // base fit's bandwidth).
  std::optional<double> bandwidth;
};

// Pilot direction -> bandwidth -> proximal ascent -> anchor normalization ->
// sample value. In full-vector mode a degenerate anchor falls back to a
// fixed-anchor race between anchor = +1 and anchor = -1, keeping the run with
// the larger objective.
RegimeEstimate estimate_regime(const Dataset& data, const SmoothingKernel& kernel,
                               const ProximalConfig& config, const EstimateOptions& options = {});

}  // namespace otr
