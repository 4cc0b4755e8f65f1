#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "otr/data.hpp"

namespace otr {

struct OracleLimits {
  Eigen::Index max_n = 500;
  Eigen::Index max_p = 3;
  // Bound on C(n, p)·n elementary operations.
  double budget = 1e9;
};

struct OracleResult {
  // Normalized (|beta[anchor]| = 1) unless only the never-treat rule attains
  // the maximum, in which case beta is the zero vector and normalized = false.
  Eigen::VectorXd beta;
  double value = 0.0;
  bool normalized = true;
  std::uint64_t candidates = 0;
};

// Exact maximizer of M_n(β) over ℝᵖ. M_n is constant on the cells cut out by
// the hyperplanes {β : xᵢᵀβ = 0}; every pointed cell has an extreme ray
// orthogonal to p-1 sample points, so enumerating those rays (both
// orientations, with the p-1 boundary points pushed to their better side)
// visits every attainable treatment pattern. Coordinate axes and the two
// constant rules are always candidates. Ties go to the lexicographically
// smallest normalized β. Exact for covariates in general position.
OracleResult exact_nonsmooth_argmax(const Dataset& data, const OracleLimits& limits = {});

struct ConstantPolicyValues {
  double treat_all = 0.0;
  double treat_none = 0.0;
  double randomized = 0.0;  // 50/50 coin flip: mean of the two
};

ConstantPolicyValues constant_policy_values(const Dataset& data);

}  // namespace otr
