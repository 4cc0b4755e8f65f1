#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

namespace otr {

enum class KernelFamily { gaussian_cdf, polynomial7 };

/// Smooth surrogate K for the indicator I(v > 0).
///
/// `gaussian_cdf` is the standard normal distribution function (order b = 2,
/// bandwidth exponent -1/5). `polynomial7` is the degree-7 polynomial that is
/// constant outside [-5, 5] (order b = 4, bandwidth exponent -1/9); its
/// derivative integrates ν, ν², ν³ to zero.
///
/// All members are pure; a kernel is a small value type and may be shared
/// freely across threads.
class SmoothingKernel {
 public:
  constexpr SmoothingKernel() noexcept = default;
  constexpr explicit SmoothingKernel(KernelFamily family) noexcept : family_(family) {}

  static constexpr SmoothingKernel gaussian() noexcept { return SmoothingKernel{KernelFamily::gaussian_cdf}; }
  static constexpr SmoothingKernel polynomial7() noexcept { return SmoothingKernel{KernelFamily::polynomial7}; }

  // Accepts "gaussian", "gaussian-cdf", "poly7", "polynomial-7".
  static SmoothingKernel from_name(std::string_view name);

  constexpr KernelFamily family() const noexcept { return family_; }
  constexpr int order() const noexcept { return family_ == KernelFamily::gaussian_cdf ? 2 : 4; }
  constexpr double bandwidth_exponent() const noexcept {
    return family_ == KernelFamily::gaussian_cdf ? -1.0 / 5.0 : -1.0 / 9.0;
  }
  std::string_view name() const noexcept;

  // Throw ValidationError on non-finite v.
  double evaluate(double v) const;
  double derivative1(double v) const;
  double derivative2(double v) const;

  // Unchecked variants for inner loops whose inputs are already known finite.
  inline double value_unchecked(double v) const noexcept;
  inline double slope_unchecked(double v) const noexcept;
  inline double curvature_unchecked(double v) const noexcept;

  // ∫ ν^i K'(ν) dν over the effective support ([-12, 12] for the Gaussian,
  // [-5, 5] for the polynomial). Requires 0 <= i <= 2·order().
  double moment_integral(int i) const;

  // a₁ = 2∫{K'(ν)}² dν and a₂ = ∫ν K''(ν) dν.
  double a1() const;
  double a2() const;

  friend constexpr bool operator==(SmoothingKernel, SmoothingKernel) = default;

 private:
  KernelFamily family_ = KernelFamily::gaussian_cdf;
};

namespace kernel_detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kPolyHalfWidth = 5.0;

inline double normal_cdf(double v) noexcept { return 0.5 * std::erfc(-v * kInvSqrt2); }
inline double normal_pdf(double v) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * v * v); }

// K(v) = 0.5 + (105/64)(u - 5u³/3 + 7u⁵/5 - 3u⁷/7), u = v/5, on [-5, 5].
inline double poly7_value(double v) noexcept {
  if (v <= -kPolyHalfWidth) return 0.0;
  if (v >= kPolyHalfWidth) return 1.0;
  const double u = v / kPolyHalfWidth;
  const double u2 = u * u;
  return 0.5 + (105.0 / 64.0) * u * (1.0 + u2 * (-5.0 / 3.0 + u2 * (7.0 / 5.0 - u2 * (3.0 / 7.0))));
}

// K'(v) = (105/320)(1 - u²)²(1 - 3u²).
inline double poly7_slope(double v) noexcept {
  if (v <= -kPolyHalfWidth || v >= kPolyHalfWidth) return 0.0;
  const double u = v / kPolyHalfWidth;
  const double u2 = u * u;
  const double w = 1.0 - u2;
  return (105.0 / 320.0) * w * w * (1.0 - 3.0 * u2);
}

// K''(v) = (21/320)(-10u + 28u³ - 18u⁵).
inline double poly7_curvature(double v) noexcept {
  if (v <= -kPolyHalfWidth || v >= kPolyHalfWidth) return 0.0;
  const double u = v / kPolyHalfWidth;
  const double u2 = u * u;
  return (21.0 / 320.0) * u * (-10.0 + u2 * (28.0 - 18.0 * u2));
}

}  // namespace kernel_detail

inline double SmoothingKernel::value_unchecked(double v) const noexcept {
  return family_ == KernelFamily::gaussian_cdf ? kernel_detail::normal_cdf(v) : kernel_detail::poly7_value(v);
}

inline double SmoothingKernel::slope_unchecked(double v) const noexcept {
  return family_ == KernelFamily::gaussian_cdf ? kernel_detail::normal_pdf(v) : kernel_detail::poly7_slope(v);
}

inline double SmoothingKernel::curvature_unchecked(double v) const noexcept {
  return family_ == KernelFamily::gaussian_cdf ? -v * kernel_detail::normal_pdf(v)
                                                : kernel_detail::poly7_curvature(v);
}

}  // namespace otr
