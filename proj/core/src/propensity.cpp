#include "otr/propensity.hpp"

#include <cmath>
#include <string>

#include "otr/error.hpp"
#include "otr/objective.hpp"

namespace otr {

namespace {

constexpr double kScoreTolerance = 1e-8;
constexpr int kMaxIterations = 100;
constexpr double kSeparationNorm = 50.0;
// Fitted probability of the observed class beyond 1 - 1e-6 (the clipping
// floor) means the likelihood is still climbing towards a boundary.
constexpr double kSeparationMargin = 13.815510557964274;

double log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& a, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd eta = x * xi;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // a·η - log(1 + e^η), evaluated stably
    const double softplus = eta[i] > 0.0 ? eta[i] + std::log1p(std::exp(-eta[i])) : std::log1p(std::exp(eta[i]));
    total += a[i] * eta[i] - softplus;
  }
  return total;
}

}  // namespace

Eigen::VectorXd logistic_score(const Eigen::MatrixXd& x, const Eigen::VectorXd& a, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd eta = x * xi;
  Eigen::VectorXd residual(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) residual[i] = a[i] - expit(eta[i]);
  return x.transpose() * residual;
}

LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& a) {
  if (x.rows() != a.size()) {
    throw ValidationError("propensity: design has " + std::to_string(x.rows()) + " rows, treatment has " +
                          std::to_string(a.size()));
  }
  const double treated = a.sum();
  if (treated <= 0.0 || treated >= static_cast<double>(a.size())) {
    throw ValidationError("propensity: both treatment classes must be present");
  }
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(x).rank() < x.cols()) {
    throw ValidationError("propensity: design matrix is not of full column rank");
  }

  LogisticModel model;
  model.coefficients = Eigen::VectorXd::Zero(x.cols());
  double loglik = log_likelihood(x, a, model.coefficients);

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    const Eigen::VectorXd eta = x * model.coefficients;
    Eigen::VectorXd prob(eta.size());
    Eigen::VectorXd curvature(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      prob[i] = expit(eta[i]);
      curvature[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::VectorXd score = x.transpose() * (a - prob);
    model.iterations = iter - 1;
    if (score.cwiseAbs().maxCoeff() < kScoreTolerance) {
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if ((2.0 * a[i] - 1.0) * eta[i] > kSeparationMargin) {
          throw NumericalError("propensity: fitted probabilities numerically 0 or 1 (observation " +
                               std::to_string(i + 1) + "), indicating complete or quasi-complete separation");
        }
      }
      model.converged = true;
      return model;
    }
    const Eigen::MatrixXd information = x.transpose() * curvature.asDiagonal() * x;
    const Eigen::VectorXd step = information.ldlt().solve(score);
    if (!step.allFinite()) throw NumericalError("propensity: singular information matrix");

    // Halve until the likelihood does not decrease.
    double scale = 1.0;
    Eigen::VectorXd candidate = model.coefficients + step;
    double candidate_loglik = log_likelihood(x, a, candidate);
    // Near the optimum the gain drops below rounding error; only a real
    // decrease triggers halving.
    const double slack = 1e-12 * (1.0 + std::abs(loglik));
    while (candidate_loglik < loglik - slack && scale > 1e-10) {
      scale *= 0.5;
      candidate = model.coefficients + scale * step;
      candidate_loglik = log_likelihood(x, a, candidate);
    }
    model.coefficients = std::move(candidate);
    loglik = candidate_loglik;
    model.iterations = iter;
    if (model.coefficients.norm() > kSeparationNorm) {
      throw NumericalError("propensity: logistic fit did not converge; coefficients diverge (‖ξ‖ > 50), "
                           "indicating complete or quasi-complete separation");
    }
  }
  const Eigen::VectorXd score = logistic_score(x, a, model.coefficients);
  model.converged = score.cwiseAbs().maxCoeff() < kScoreTolerance;
  if (!model.converged) throw NumericalError("propensity: logistic fit did not converge in 100 iterations");
  return model;
}

Eigen::VectorXd predict_propensity(const LogisticModel& model, const Eigen::MatrixXd& x) {
  if (!model.converged) throw ValidationError("propensity: model did not converge");
  if (x.cols() != model.coefficients.size()) {
    throw ValidationError("propensity: design has " + std::to_string(x.cols()) + " columns, model has " +
                          std::to_string(model.coefficients.size()));
  }
  const Eigen::VectorXd eta = x * model.coefficients;
  Eigen::VectorXd prob(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) prob[i] = expit(eta[i]);
  return clip_propensity(std::move(prob));
}

}  // namespace otr
