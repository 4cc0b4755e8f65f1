#pragma once

// Independent oracles and fixtures shared by the unit and acceptance suites.
// Nothing here calls into the code paths it is used to check.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "otr/data.hpp"
#include "otr/kernels.hpp"

namespace otr::testing {

inline Dataset make_dataset(const Eigen::MatrixXd& x, const std::vector<double>& a, const std::vector<double>& y,
                            Eigen::Index anchor, bool has_intercept) {
  Eigen::VectorXd av = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return Dataset(x, av, yv, {}, anchor, has_intercept);
}

// Intercept plus (p-1) standard normal covariates, balanced-ish random
// treatment, outcome with a linear contrast plus noise. Anchor is column 1.
inline Dataset random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd a(n), y(n);
  Eigen::VectorXd contrast(p);
  for (auto& c : contrast) c = normal(rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) x(i, j) = normal(rng);
    a[i] = (i % 2 == 0) ? 1.0 : 0.0;
    if (normal(rng) > 1.2) a[i] = 1.0 - a[i];
    y[i] = 0.5 * x(i, 1) + a[i] * x.row(i).dot(contrast) + normal(rng);
  }
  return Dataset(std::move(x), std::move(a), std::move(y), {}, 1, true);
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& at, double step) {
  Eigen::VectorXd g(at.size());
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    Eigen::VectorXd up = at, down = at;
    up[j] += step;
    down[j] -= step;
    g[j] = (f(up) - f(down)) / (2.0 * step);
  }
  return g;
}

inline Eigen::MatrixXd central_difference_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                                   const Eigen::VectorXd& at, double step) {
  Eigen::MatrixXd jac(at.size(), at.size());
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    Eigen::VectorXd up = at, down = at;
    up[j] += step;
    down[j] -= step;
    jac.col(j) = (f(up) - f(down)) / (2.0 * step);
  }
  return jac;
}

inline double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

// Direct transcription of the smoothed objective, term by term, without the
// precomputed coefficient form used by the library.
inline double literal_smoothed_objective(const Dataset& data, const SmoothingKernel& kernel, double h,
                                         const Eigen::VectorXd& beta,
                                         const std::optional<Eigen::VectorXd>& weights = std::nullopt,
                                         const std::optional<Eigen::VectorXd>& propensity = std::nullopt) {
  const auto n = static_cast<double>(data.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double r = weights ? (*weights)[i] : 1.0;
    const double k = kernel.evaluate(data.covariates().row(i).dot(beta) / h);
    const double a = data.treatment()[i];
    const double y = data.outcome()[i];
    if (propensity) {
      const double pi = (*propensity)[i];
      total += r * (a * k + (1.0 - a) * (1.0 - k)) * y / (a * pi + (1.0 - a) * (1.0 - pi)) / n;
    } else {
      total += 2.0 / n * r * (2.0 * a - 1.0) * k * y;
    }
  }
  return total;
}

inline double normal_cdf(double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2); }
inline double normal_pdf(double v) { return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi); }

// Closed-form values for Gaussian-covariate settings with outcome
// exp(xᵀη) + A·xᵀβ: E exp(xᵀη) = exp(η₀ + ‖η̃‖²/2) and, for z = xᵀβ ~ N(μ, σ²),
// E z⁺ = μΦ(μ/σ) + σφ(μ/σ).
struct ClosedFormValues {
  double optimal;
  double random_policy;
};

inline ClosedFormValues gaussian_setting_values(const Eigen::Vector4d& beta) {
  const Eigen::Vector4d eta{-1.0, -0.5, 0.5, -0.5};
  const double baseline = std::exp(eta[0] + 0.5 * eta.tail<3>().squaredNorm());
  const double mu = beta[0];
  const double sigma = beta.tail<3>().norm();
  const double positive_part = mu * normal_cdf(mu / sigma) + sigma * normal_pdf(mu / sigma);
  return {baseline + positive_part, baseline + 0.5 * mu};
}

}  // namespace otr::testing
