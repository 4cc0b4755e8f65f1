#include "otr/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otr/error.hpp"

namespace otr {

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("inference: quantile of an empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const double position = static_cast<double>(sorted.size() - 1) * q;
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const double fraction = position - static_cast<double>(lower);
  if (lower + 1 >= sorted.size()) return sorted.back();
  return sorted[lower] + fraction * (sorted[lower + 1] - sorted[lower]);
}

double quantile_of(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  return empirical_quantile(values, q);
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double interquartile_range(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return empirical_quantile(values, 0.75) - empirical_quantile(values, 0.25);
}

}  // namespace otr
