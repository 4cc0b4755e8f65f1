#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "otr/data.hpp"
#include "otr/error.hpp"
#include "otr/optimizer.hpp"
#include "test_support.hpp"

namespace {

otr::CsvColumns default_columns() {
  otr::CsvColumns c;
  c.outcome = "y";
  c.treatment = "a";
  c.covariates = {"x1", "x2"};
  c.anchor = "x1";
  return c;
}

std::string error_message(const std::string& csv) {
  std::istringstream in(csv);
  try {
    otr::parse_csv(in, default_columns());
  } catch (const otr::ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Data, ParsesHeaderAndAddsIntercept) {
  std::istringstream in("x2,y,a,x1\n0.5,1.25,1,-1\n1.5,-2,0,3\n2.5,0,1,4e-1\n");
  const auto data = otr::parse_csv(in, default_columns());
  ASSERT_EQ(data.size(), 3);
  ASSERT_EQ(data.dimension(), 3);
  EXPECT_TRUE(data.has_intercept());
  EXPECT_EQ(data.anchor_index(), 1);
  EXPECT_EQ(data.column_names()[0], otr::kInterceptName);
  EXPECT_EQ(data.column_index("x2"), 2);
  EXPECT_DOUBLE_EQ(data.covariates()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(data.covariates()(2, 1), 0.4);
  EXPECT_DOUBLE_EQ(data.covariates()(1, 2), 1.5);
  EXPECT_DOUBLE_EQ(data.outcome()[0], 1.25);
  EXPECT_EQ(data.treated_count(), 2);
}

TEST(Data, NonNumericCellNamesRowAndColumn) {
  const auto msg = error_message("y,a,x1,x2\n1,0,1,2\n2,1,2,3\n3,1,abc,4\n");
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("x1"), std::string::npos) << msg;
}

TEST(Data, RejectsNonBinaryTreatment) {
  const auto msg = error_message("y,a,x1,x2\n1,0,1,2\n2,2,2,3\n");
  EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'a'"), std::string::npos) << msg;
}

TEST(Data, RejectsNonFiniteAndRaggedRows) {
  EXPECT_FALSE(error_message("y,a,x1,x2\n1,0,1,2\nnan,1,2,3\n").empty());
  EXPECT_FALSE(error_message("y,a,x1,x2\n1,0,1,2\ninf,1,2,3\n").empty());
  EXPECT_FALSE(error_message("y,a,x1,x2\n1,0,1,2\n1,1,2\n").empty());
  EXPECT_FALSE(error_message("y,a,x1\n1,0,1\n1,1,2\n").empty());
  EXPECT_FALSE(error_message("y,a,x1,x2\n1,0,1,2\n").empty());
}

TEST(Data, AnchorMustBeACovariate) {
  auto cols = default_columns();
  cols.anchor = "x3";
  std::istringstream in("y,a,x1,x2\n1,0,1,2\n2,1,2,3\n");
  EXPECT_THROW(otr::parse_csv(in, cols), otr::ValidationError);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 2);
  EXPECT_THROW(otr::testing::make_dataset(x, {0, 1}, {1, 2}, 0, true), otr::ValidationError);
  EXPECT_THROW(otr::testing::make_dataset(x, {0, 1}, {1, 2}, 2, true), otr::ValidationError);
}

TEST(Data, ConstructorValidatesShapes) {
  Eigen::MatrixXd x(1, 2);
  x << 1, 2;
  EXPECT_THROW(otr::testing::make_dataset(x, {1}, {1}, 1, true), otr::ValidationError);
  Eigen::MatrixXd x2(2, 2);
  x2 << 1, 2, 1, 3;
  EXPECT_THROW(otr::testing::make_dataset(x2, {1}, {1, 2}, 1, true), otr::ValidationError);
  EXPECT_THROW(otr::testing::make_dataset(x2, {0.5, 1}, {1, 2}, 1, true), otr::ValidationError);
}

TEST(Data, SingleArmLoadsButCannotBeEstimated) {
  std::istringstream in("y,a,x1,x2\n1,1,1,2\n2,1,2,3\n3,1,0,1\n");
  const auto data = otr::parse_csv(in, default_columns());
  EXPECT_EQ(data.treated_count(), 3);
  try {
    otr::validate_for_estimation(data);
    FAIL() << "expected ValidationError";
  } catch (const otr::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("single treatment arm"), std::string::npos);
  }
  EXPECT_THROW(otr::estimate_regime(data, otr::SmoothingKernel{}, otr::ProximalConfig{}), otr::ValidationError);
}

TEST(Data, ConstantAnchorIsDegenerate) {
  std::istringstream in("y,a,x1,x2\n1,1,7,2\n2,0,7,3\n3,1,7,1\n");
  const auto data = otr::parse_csv(in, default_columns());
  try {
    otr::validate_for_estimation(data);
    FAIL() << "expected ValidationError";
  } catch (const otr::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate anchor"), std::string::npos);
  }
}

TEST(Data, CsvRoundTripIsExact) {
  std::mt19937_64 rng(11);
  const auto data = otr::testing::random_instance(rng, 40, 3);
  std::ostringstream out;
  otr::write_csv(data, out);
  std::istringstream in(out.str());
  otr::CsvColumns cols;
  cols.outcome = "y";
  cols.treatment = "a";
  for (Eigen::Index j = 1; j < data.dimension(); ++j) cols.covariates.push_back(data.column_names()[j]);
  cols.anchor = data.column_names()[1];
  const auto back = otr::parse_csv(in, cols);
  EXPECT_EQ(back.covariates(), data.covariates());
  EXPECT_EQ(back.treatment(), data.treatment());
  EXPECT_EQ(back.outcome(), data.outcome());
  EXPECT_EQ(back.column_names(), data.column_names());
  EXPECT_EQ(back.anchor_index(), data.anchor_index());
}

TEST(Data, MissingFile) {
  EXPECT_THROW(otr::load_csv("/nonexistent/otr/data.csv", default_columns()), otr::ValidationError);
}
