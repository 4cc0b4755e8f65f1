#include <gtest/gtest.h>

#include <cmath>

#include "otr/error.hpp"
#include "otr/propensity.hpp"
#include "otr/rng.hpp"

namespace {

Eigen::MatrixXd intercept_only(Eigen::Index n) { return Eigen::MatrixXd::Ones(n, 1); }

Eigen::VectorXd treated_fraction(Eigen::Index n, Eigen::Index treated) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  a.head(treated).setOnes();
  return a;
}

}  // namespace

TEST(Propensity, InterceptOnlyBalanced) {
  const auto model = otr::fit_logistic(intercept_only(40), treated_fraction(40, 20));
  EXPECT_TRUE(model.converged);
  EXPECT_NEAR(model.coefficients[0], 0.0, 1e-12);
}

TEST(Propensity, InterceptOnlyThreeQuarters) {
  const auto model = otr::fit_logistic(intercept_only(40), treated_fraction(40, 30));
  EXPECT_NEAR(model.coefficients[0], std::log(3.0), 1e-10);
  EXPECT_NEAR(model.coefficients[0], 1.0986122886681098, 1e-10);
}

TEST(Propensity, SeparationIsReported) {
  Eigen::MatrixXd x(6, 2);
  x << 1, -3, 1, -2, 1, -1, 1, 1, 1, 2, 1, 3;
  Eigen::VectorXd a(6);
  a << 0, 0, 0, 1, 1, 1;
  EXPECT_THROW(otr::fit_logistic(x, a), otr::NumericalError);
  // Quasi-complete: one tied pair at the split point.
  Eigen::MatrixXd xq(8, 2);
  xq << 1, -3, 1, -2, 1, -1, 1, 0, 1, 0, 1, 1, 1, 2, 1, 3;
  Eigen::VectorXd aq(8);
  aq << 0, 0, 0, 0, 1, 1, 1, 1;
  EXPECT_THROW(otr::fit_logistic(xq, aq), otr::NumericalError);
  otr::LogisticModel unconverged;
  unconverged.coefficients = Eigen::VectorXd::Zero(1);
  EXPECT_THROW(otr::predict_propensity(unconverged, intercept_only(2)), otr::ValidationError);
}

TEST(Propensity, ModerateSampleConverges) {
  auto rng = otr::make_stream(62);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  for (const Eigen::Index n : {50, 400, 3000}) {
    Eigen::MatrixXd x(n, 4);
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x.row(i) << 1.0, normal(rng), normal(rng), normal(rng);
      a[i] = unit(rng) < otr::expit(0.2 + 0.5 * (x(i, 1) + x(i, 2) + x(i, 3))) ? 1.0 : 0.0;
    }
    const auto model = otr::fit_logistic(x, a);
    EXPECT_TRUE(model.converged) << n;
    EXPECT_LT(model.iterations, 15) << n;
  }
}

TEST(Propensity, InputValidation) {
  EXPECT_THROW(otr::fit_logistic(intercept_only(10), Eigen::VectorXd::Ones(10)), otr::ValidationError);
  EXPECT_THROW(otr::fit_logistic(intercept_only(10), Eigen::VectorXd::Zero(10)), otr::ValidationError);
  Eigen::MatrixXd collinear(6, 2);
  collinear.col(0).setOnes();
  collinear.col(1).setConstant(2.0);
  EXPECT_THROW(otr::fit_logistic(collinear, treated_fraction(6, 3)), otr::ValidationError);
  EXPECT_THROW(otr::fit_logistic(intercept_only(6), treated_fraction(5, 3)), otr::ValidationError);
}

TEST(Propensity, Predictions) {
  otr::LogisticModel zero;
  zero.converged = true;
  zero.coefficients = Eigen::Vector2d::Zero();
  Eigen::MatrixXd x(3, 2);
  x << 1, 0.2, 1, -4, 1, 9;
  EXPECT_TRUE(otr::predict_propensity(zero, x).isApprox(Eigen::Vector3d::Constant(0.5)));
  otr::LogisticModel ln3;
  ln3.converged = true;
  ln3.coefficients = Eigen::VectorXd::Constant(1, std::log(3.0));
  EXPECT_NEAR(otr::predict_propensity(ln3, intercept_only(2))[0], 0.75, 1e-15);
  otr::LogisticModel extreme;
  extreme.converged = true;
  extreme.coefficients = Eigen::VectorXd::Constant(1, 50.0);
  EXPECT_DOUBLE_EQ(otr::predict_propensity(extreme, intercept_only(1))[0], 1.0 - 1e-6);
  EXPECT_NEAR(otr::expit(-800.0), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(otr::expit(800.0), 1.0);
}

TEST(Propensity, RecoversGeneratingCoefficients) {
  const Eigen::Vector4d eta{0.2, 0.5, 0.5, 0.5};
  const Eigen::Index n = 100000;
  auto rng = otr::make_stream(61);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Eigen::MatrixXd x(n, 4);
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) << 1.0, normal(rng), normal(rng), normal(rng);
    a[i] = unit(rng) < 1.0 / (1.0 + std::exp(-x.row(i).dot(eta))) ? 1.0 : 0.0;
  }
  const auto model = otr::fit_logistic(x, a);
  ASSERT_TRUE(model.converged);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(model.coefficients[j], eta[j], 0.03) << j;
  EXPECT_LT(otr::logistic_score(x, a, model.coefficients).cwiseAbs().maxCoeff(), 1e-8);
}
