#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otr/data.hpp"
#include "otr/inference.hpp"
#include "otr/kernels.hpp"
#include "otr/optimizer.hpp"
#include "otr/rng.hpp"

namespace otr {

/// Generative settings. All share x = (1, x₁, x₂, x₃), x̃ ~ N(0, I₃),
/// A ~ Bernoulli(1/2) and Y = exp(xᵀη) + A·xᵀβ + ε with η = (-1, -.5, .5, -.5):
///   s1  β = (-2, -2, 2, 2)          s2  β = (-2, -2, 2, 0)
///   s3  β = (1, 2, 0.02, 0)         s4  β = (-1, 1, 0, 0), x₁ uniform on {-1, 0, 1, 2}
///   s5  β = (-1, 1, 0, 0), x₁ uniform on {1, 2}
/// binary:        P(Y = 1 | x, A) = expit(xᵀη + A·xᵀβ) with the base setting's β.
/// observational: A | x ~ Bernoulli(expit(xᵀη_obs)), η_obs = (0.2, 0.5, 0.5, 0.5).
/// local:         β = β₀ + bₙ s with β₀ the base setting's normalized β,
///                bₙ = (n hₙ)^(-1/2) and s[anchor] = 0.
enum class Setting { s1, s2, s3, s4, s5, binary, observational, local };

std::string_view to_string(Setting setting) noexcept;
Setting setting_from_name(std::string_view name);

struct SimulationSpec {
  Setting setting = Setting::s1;
  // Parameter source for binary, observational and local (s1 or s2).
  Setting base = Setting::s1;
  Eigen::Index n = 300;
  int replicates = 100;
  std::optional<BootstrapConfig> bootstrap;
  SmoothingKernel kernel;
  ProximalConfig prox;
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> local_s;
  Eigen::Index eval_sample_size = 10000;
  Eigen::Index truth_draws = 1000000;
  // 0 means resolve_threads().
  unsigned threads = 1;

  void validate() const;
};

inline constexpr Eigen::Index kSimulationAnchor = 1;

struct GeneratedSample {
  Dataset data;
  Eigen::VectorXd true_beta_opt;
};

// β used in the outcome model (before normalization).
Eigen::VectorXd generative_beta(const SimulationSpec& spec);
// Normalized parameter of the optimal regime.
Eigen::VectorXd true_beta_opt(const SimulationSpec& spec);

Eigen::MatrixXd draw_covariates(const SimulationSpec& spec, Eigen::Index count, Rng& rng);
GeneratedSample generate_dataset(const SimulationSpec& spec, Rng& rng);

// E{Y*(d_β)} from the noise-free potential-outcome means over `draws`
// covariate draws.
double true_value_monte_carlo(const SimulationSpec& spec, const Eigen::VectorXd& beta, Eigen::Index draws, Rng& rng);
// Value of the 50/50 randomized policy.
double random_policy_value_monte_carlo(const SimulationSpec& spec, Eigen::Index draws, Rng& rng);

// Fraction of spec.eval_sample_size fresh covariate draws on which
// I(xᵀβ̂ > 0) = I(xᵀβ > 0).
double match_ratio(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true, const SimulationSpec& spec,
                   Rng& rng);

// Fraction of covariate draws lying exactly on xᵀβ_gen = 0.
double boundary_mass(const SimulationSpec& spec, Eigen::Index draws, Rng& rng);

// Estimates the regime for one simulated sample; the observational setting
// fits a logistic propensity model on all covariates first.
RegimeEstimate estimate_for_setting(const SimulationSpec& spec, const Dataset& data);

struct StudyMetrics {
  Setting setting = Setting::s1;
  Eigen::Index n = 0;
  int replicates = 0;
  int failed_replicates = 0;
  std::vector<std::string> coefficient_names;
  Eigen::VectorXd true_beta;
  Eigen::VectorXd bias;
  Eigen::VectorXd sd;  // NaN when fewer than two replicates
  bool sd_defined = false;
  double match_ratio = 0.0;
  double true_value = 0.0;
  double random_policy_value = 0.0;
  double value_bias = 0.0;
  double value_sd = 0.0;

  // Coverage study only.
  bool has_coverage = false;
  Eigen::VectorXd coverage;
  Eigen::VectorXd mean_length;
  double value_coverage = 0.0;
  double value_mean_length = 0.0;
  double random_policy_coverage = 0.0;
  int bootstrap_replicates = 0;

  double wall_seconds = 0.0;
};

StudyMetrics run_estimation_study(const SimulationSpec& spec);
StudyMetrics run_coverage_study(const SimulationSpec& spec);

}  // namespace otr
