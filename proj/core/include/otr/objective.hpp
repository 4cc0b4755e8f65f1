#pragma once

#include <Eigen/Dense>

#include <optional>

#include "otr/data.hpp"
#include "otr/kernels.hpp"

namespace otr {

inline constexpr double kPropensityFloor = 1e-6;

/// Everything the smoothed objective needs besides β: data, kernel, bandwidth
/// h, optional bootstrap weights rᵢ and optional propensities π̂ᵢ.
///
/// Without propensities the objective is the randomized-trial form
///   M̃(β) = (2/n) Σ rᵢ(2Aᵢ-1) K(xᵢᵀβ/h) Yᵢ.
/// With propensities it is the inverse-probability-weighted form
///   (1/n) Σ rᵢ [Aᵢ K + (1-Aᵢ)(1-K)] Yᵢ / [Aᵢπ̂ᵢ + (1-Aᵢ)(1-π̂ᵢ)].
/// Both reduce to offset + Σ cᵢ K(xᵢᵀβ/h) with a β-free offset; the
/// constructor precomputes cᵢ and the offset.
///
/// The context references `data`, which must outlive it.
class ObjectiveContext {
 public:
  ObjectiveContext(const Dataset& data, SmoothingKernel kernel, double bandwidth,
                   std::optional<Eigen::VectorXd> unit_weights = std::nullopt,
                   std::optional<Eigen::VectorXd> propensity = std::nullopt);

  const Dataset& data() const noexcept { return *data_; }
  const SmoothingKernel& kernel() const noexcept { return kernel_; }
  double bandwidth() const noexcept { return bandwidth_; }
  const std::optional<Eigen::VectorXd>& unit_weights() const noexcept { return weights_; }
  // Clipped to (kPropensityFloor, 1 - kPropensityFloor).
  const std::optional<Eigen::VectorXd>& propensity() const noexcept { return propensity_; }

  const Eigen::VectorXd& unit_coefficients() const noexcept { return coefficients_; }
  double offset() const noexcept { return offset_; }

 private:
  const Dataset* data_;
  SmoothingKernel kernel_;
  double bandwidth_;
  std::optional<Eigen::VectorXd> weights_;
  std::optional<Eigen::VectorXd> propensity_;
  Eigen::VectorXd coefficients_;
  double offset_ = 0.0;
};

struct ObjectiveEvaluation {
  double value;
  Eigen::VectorXd gradient;
};

double smoothed_objective(const ObjectiveContext& ctx, const Eigen::VectorXd& beta);
// Value and gradient from one pass over the sample.
ObjectiveEvaluation evaluate_objective(const ObjectiveContext& ctx, const Eigen::VectorXd& beta);
Eigen::VectorXd smoothed_gradient(const ObjectiveContext& ctx, const Eigen::VectorXd& beta);
// Diagnostic use; symmetric by construction.
Eigen::MatrixXd smoothed_hessian(const ObjectiveContext& ctx, const Eigen::VectorXd& beta);

// M_n(β) = (2/n) Σ (2Aᵢ-1) I(xᵢᵀβ > 0) Yᵢ.
double nonsmooth_objective(const Dataset& data, const Eigen::VectorXd& beta);

// V_n(β) = (2/n) Σ rᵢ {Aᵢ I(xᵢᵀβ > 0) + (1-Aᵢ) I(xᵢᵀβ <= 0)} Yᵢ, or its
// inverse-probability-weighted analogue when propensities are given.
double value_estimate(const Dataset& data, const Eigen::VectorXd& beta,
                      const std::optional<Eigen::VectorXd>& unit_weights = std::nullopt,
                      const std::optional<Eigen::VectorXd>& propensity = std::nullopt);

// Least-squares regression of the contrast response on x: the response is
// (2Aᵢ-1)·2Yᵢ, or (2Aᵢ-1)Yᵢ/[Aᵢπ̂ᵢ + (1-Aᵢ)(1-π̂ᵢ)] with propensities.
Eigen::VectorXd pilot_direction(const Dataset& data,
                                const std::optional<Eigen::VectorXd>& propensity = std::nullopt);

// h = 0.9 n^e min(sd(z), IQR(z)/1.34), z = X·pilot, e the kernel's bandwidth
// exponent, floored at 1e-6. Falls back to 0.9 n^e sd(anchor column) when
// sd(z) = 0.
double select_bandwidth(const Dataset& data, const SmoothingKernel& kernel,
                        const Eigen::VectorXd& pilot_direction);

Eigen::VectorXd clip_propensity(Eigen::VectorXd propensity);

}  // namespace otr
