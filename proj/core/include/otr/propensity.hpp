#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace otr {

struct LogisticModel {
  Eigen::VectorXd coefficients;
  bool converged = false;
  int iterations = 0;
};

// Maximum-likelihood logistic regression of A on X by Newton's method with
// step halving. Converges when max |score| < 1e-8; gives up after 100
// iterations. Throws NumericalError on (quasi-)separation, detected as
// ‖ξ‖ > 50 or a fitted probability of the observed class above 1 - 1e-6, and ValidationError when a class is missing or X is rank deficient.
LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& a);

// Score Xᵀ(A - expit(Xξ)).
Eigen::VectorXd logistic_score(const Eigen::MatrixXd& x, const Eigen::VectorXd& a, const Eigen::VectorXd& xi);

// expit(Xξ), clipped to (1e-6, 1 - 1e-6).
Eigen::VectorXd predict_propensity(const LogisticModel& model, const Eigen::MatrixXd& x);

inline double expit(double v) noexcept {
  return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

}  // namespace otr
