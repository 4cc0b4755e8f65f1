#pragma once

#include <span>
#include <vector>

namespace otr {

// Linear interpolation between order statistics at fractional index (m-1)q.
// `sorted` must be ascending and nonempty; q is clamped to [0, 1].
double empirical_quantile(std::span<const double> sorted, double q);

// Sorts a copy, then interpolates.
double quantile_of(std::vector<double> values, double q);

// Sample standard deviation with the n-1 denominator (0 for fewer than 2 values).
double sample_sd(std::span<const double> values);

// Q3 - Q1 with the same interpolation rule.
double interquartile_range(std::vector<double> values);

}  // namespace otr
