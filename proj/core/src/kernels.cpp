#include "otr/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <string>

#include "otr/error.hpp"

namespace otr {

namespace {

constexpr double kGaussianSupport = 12.0;
constexpr double kQuadratureTolerance = 1e-12;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ValidationError(std::string("kernels: ") + what + " requires a finite argument");
  }
}

template <class F>
double integrate_over_support(const SmoothingKernel& kernel, F&& f) {
  const double half = kernel.family() == KernelFamily::gaussian_cdf ? kGaussianSupport
                                                                    : kernel_detail::kPolyHalfWidth;
  double error = 0.0;
  double l1 = 0.0;
  // Split at 0 so the 61-point rule resolves the Gaussian bump on each half.
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0;
  for (auto [lo, hi] : {std::pair{-half, 0.0}, std::pair{0.0, half}}) {
    double piece_error = 0.0;
    double piece_l1 = 0.0;
    total += Rule::integrate(f, lo, hi, 15, kQuadratureTolerance, &piece_error, &piece_l1);
    error += piece_error;
    l1 += piece_l1;
  }
  if (!(error <= 1e-10 * std::max(1.0, l1))) {
    throw NumericalError("kernels: quadrature did not converge (error estimate " +
                         std::to_string(error) + ")");
  }
  return total;
}

}  // namespace

SmoothingKernel SmoothingKernel::from_name(std::string_view name) {
  if (name == "gaussian" || name == "gaussian-cdf") return gaussian();
  if (name == "poly7" || name == "polynomial-7") return polynomial7();
  throw ValidationError("kernels: unknown kernel '" + std::string(name) +
                        "' (expected gaussian or poly7)");
}

std::string_view SmoothingKernel::name() const noexcept {
  return family_ == KernelFamily::gaussian_cdf ? "gaussian-cdf" : "polynomial-7";
}

double SmoothingKernel::evaluate(double v) const {
  require_finite(v, "evaluate");
  return value_unchecked(v);
}

double SmoothingKernel::derivative1(double v) const {
  require_finite(v, "derivative1");
  return slope_unchecked(v);
}

double SmoothingKernel::derivative2(double v) const {
  require_finite(v, "derivative2");
  return curvature_unchecked(v);
}

double SmoothingKernel::moment_integral(int i) const {
  if (i < 0 || i > 2 * order()) {
    throw ValidationError("kernels: moment index " + std::to_string(i) + " outside [0, " +
                          std::to_string(2 * order()) + "]");
  }
  return integrate_over_support(*this, [this, i](double v) {
    return std::pow(v, i) * slope_unchecked(v);
  });
}

double SmoothingKernel::a1() const {
  return 2.0 * integrate_over_support(*this, [this](double v) {
    const double s = slope_unchecked(v);
    return s * s;
  });
}

double SmoothingKernel::a2() const {
  return integrate_over_support(*this, [this](double v) { return v * curvature_unchecked(v); });
}

}  // namespace otr
