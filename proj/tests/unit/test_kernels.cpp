#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>

#include "otr/error.hpp"
#include "otr/kernels.hpp"

using otr::SmoothingKernel;

namespace {

const std::array<double, 7> kGrid{-4.9, -3.0, -1.0, 0.0, 1.0, 3.0, 4.9};

// Exact rationals for ∫ν^i K'(ν)dν, i = 0..8, of the degree-7 polynomial.
const std::array<double, 9> kPolyMoments{1.0, 0.0, 0.0, 0.0, -625.0 / 33.0, 0.0, -156250.0 / 429.0, 0.0,
                                         -2734375.0 / 429.0};

}  // namespace

TEST(Kernels, GaussianValuesAtReferencePoints) {
  const auto k = SmoothingKernel::gaussian();
  EXPECT_DOUBLE_EQ(k.evaluate(0.0), 0.5);
  EXPECT_NEAR(k.evaluate(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(k.derivative1(0.0), 0.3989422804014327, 1e-15);
  EXPECT_DOUBLE_EQ(k.derivative2(0.0), 0.0);
}

TEST(Kernels, PolynomialValuesAtReferencePoints) {
  const auto k = SmoothingKernel::polynomial7();
  EXPECT_DOUBLE_EQ(k.evaluate(0.0), 0.5);
  EXPECT_DOUBLE_EQ(k.evaluate(5.0), 1.0);
  EXPECT_DOUBLE_EQ(k.evaluate(-5.0), 0.0);
  EXPECT_DOUBLE_EQ(k.evaluate(7.5), 1.0);
  EXPECT_DOUBLE_EQ(k.evaluate(-7.5), 0.0);
  EXPECT_NEAR(k.derivative1(0.0), 21.0 / 64.0, 1e-15);
  EXPECT_NEAR(k.derivative2(2.0), -0.156996, 1e-6);
  EXPECT_NEAR(k.evaluate(4.0), 1.017684, 1e-6);
  EXPECT_DOUBLE_EQ(k.derivative1(6.0), 0.0);
  EXPECT_DOUBLE_EQ(k.derivative2(-6.0), 0.0);
}

TEST(Kernels, OrderAndExponent) {
  EXPECT_EQ(SmoothingKernel::gaussian().order(), 2);
  EXPECT_EQ(SmoothingKernel::polynomial7().order(), 4);
  EXPECT_DOUBLE_EQ(SmoothingKernel::gaussian().bandwidth_exponent(), -0.2);
  EXPECT_DOUBLE_EQ(SmoothingKernel::polynomial7().bandwidth_exponent(), -1.0 / 9.0);
}

TEST(Kernels, NamesRoundTrip) {
  for (const auto k : {SmoothingKernel::gaussian(), SmoothingKernel::polynomial7()}) {
    EXPECT_EQ(SmoothingKernel::from_name(k.name()), k);
  }
  EXPECT_EQ(SmoothingKernel::from_name("poly7"), SmoothingKernel::polynomial7());
  EXPECT_EQ(SmoothingKernel::from_name("gaussian"), SmoothingKernel::gaussian());
  EXPECT_THROW(SmoothingKernel::from_name("epanechnikov"), otr::ValidationError);
}

TEST(Kernels, RejectsNonFiniteInput) {
  const auto k = SmoothingKernel::polynomial7();
  EXPECT_THROW(k.evaluate(std::numeric_limits<double>::quiet_NaN()), otr::ValidationError);
  EXPECT_THROW(k.derivative1(std::numeric_limits<double>::infinity()), otr::ValidationError);
  EXPECT_THROW(SmoothingKernel::gaussian().derivative2(-std::numeric_limits<double>::infinity()),
               otr::ValidationError);
}

TEST(Kernels, DerivativesMatchFiniteDifferences) {
  constexpr double step = 1e-5;
  for (const auto k : {SmoothingKernel::gaussian(), SmoothingKernel::polynomial7()}) {
    for (const double v : kGrid) {
      const double fd1 = (k.evaluate(v + step) - k.evaluate(v - step)) / (2 * step);
      const double fd2 = (k.derivative1(v + step) - k.derivative1(v - step)) / (2 * step);
      const double d1 = k.derivative1(v);
      const double d2 = k.derivative2(v);
      EXPECT_LT(std::abs(fd1 - d1), 1e-6 * std::abs(d1)) << k.name() << " K' at " << v;
      if (d2 != 0.0) {
        EXPECT_LT(std::abs(fd2 - d2), 1e-6 * std::abs(d2)) << k.name() << " K'' at " << v;
      } else {
        EXPECT_LT(std::abs(fd2), 1e-12) << k.name() << " K'' at " << v;
      }
    }
  }
}

TEST(Kernels, Symmetry) {
  for (const auto k : {SmoothingKernel::gaussian(), SmoothingKernel::polynomial7()}) {
    for (double v = -6.0; v <= 6.0; v += 0.37) {
      EXPECT_NEAR(k.evaluate(v) + k.evaluate(-v), 1.0, 1e-15);
      EXPECT_NEAR(k.derivative1(v), k.derivative1(-v), 1e-15);
    }
  }
}

TEST(Kernels, Bounded) {
  // The polynomial overshoots the unit interval between 5/√3 and 5; its
  // extremes are K(±5/√3).
  const auto poly = SmoothingKernel::polynomial7();
  const double peak = poly.evaluate(5.0 / std::sqrt(3.0));
  EXPECT_NEAR(peak, 1.0532940079733914, 1e-12);
  const auto gauss = SmoothingKernel::gaussian();
  for (double v = -8.0; v <= 8.0; v += 1e-3) {
    EXPECT_LE(std::abs(poly.evaluate(v)), peak + 1e-15);
    EXPECT_GE(poly.evaluate(v), 1.0 - peak - 1e-15);
    EXPECT_GE(gauss.evaluate(v), 0.0);
    EXPECT_LE(gauss.evaluate(v), 1.0);
  }
}

TEST(Kernels, GaussianMoments) {
  const auto k = SmoothingKernel::gaussian();
  const std::array<double, 5> want{1.0, 0.0, 1.0, 0.0, 3.0};
  for (int i = 0; i <= 4; ++i) EXPECT_NEAR(k.moment_integral(i), want[static_cast<std::size_t>(i)], 1e-10) << i;
  EXPECT_NEAR(k.a1(), 0.5641895835477563, 1e-10);
  EXPECT_NEAR(k.a2(), -1.0, 1e-10);
}

TEST(Kernels, PolynomialMoments) {
  const auto k = SmoothingKernel::polynomial7();
  for (int i = 0; i <= 8; ++i) {
    const double want = kPolyMoments[static_cast<std::size_t>(i)];
    EXPECT_NEAR(k.moment_integral(i), want, 1e-10 * std::max(1.0, std::abs(want))) << i;
  }
  EXPECT_NEAR(k.a1(), 0.56293706293706294, 1e-10);
  EXPECT_NEAR(k.a2(), -1.0, 1e-10);
  // Order four: moments 1..3 vanish, the fourth does not.
  EXPECT_GT(std::abs(k.moment_integral(4)), 1.0);
}

TEST(Kernels, MomentIndexOutOfRange) {
  EXPECT_THROW(SmoothingKernel::gaussian().moment_integral(5), otr::ValidationError);
  EXPECT_THROW(SmoothingKernel::polynomial7().moment_integral(-1), otr::ValidationError);
  EXPECT_NO_THROW(SmoothingKernel::polynomial7().moment_integral(8));
}
