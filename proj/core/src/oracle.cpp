#include "otr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "otr/error.hpp"
#include "otr/objective.hpp"

namespace otr {

namespace {

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

class CandidateSearch {
 public:
  explicit CandidateSearch(const Dataset& data) : data_(data) {
    const auto anchor = data.covariates().col(data.anchor_index());
    anchor_scale_ = anchor.cwiseAbs().maxCoeff();
  }

  // Offers a rule; it is kept if it beats (or ties with a smaller) the
  // incumbent after anchor normalization.
  void offer(const Eigen::VectorXd& beta) {
    ++count_;
    const double value = nonsmooth_objective(data_, beta);
    if (best_ && value < best_->value) return;
    auto normalized = normalize_preserving_rule(beta, value);
    if (!normalized) return;
    if (!best_ || value > best_->value ||
        (value == best_->value && lexicographically_less(*normalized, best_->beta))) {
      best_ = OracleResult{std::move(*normalized), value, true, 0};
    }
  }

  std::optional<OracleResult> best() const {
    auto out = best_;
    if (out) out->candidates = count_;
    return out;
  }
  std::uint64_t count() const noexcept { return count_; }

 private:
  // Scales beta so |beta[anchor]| = 1 without changing which units are
  // treated. A zero anchor coefficient is nudged when that leaves M_n intact.
  std::optional<Eigen::VectorXd> normalize_preserving_rule(Eigen::VectorXd beta, double value) const {
    const auto a = data_.anchor_index();
    if (beta[a] == 0.0) {
      const Eigen::VectorXd z = data_.covariates() * beta;
      const double margin = z.cwiseAbs().minCoeff();
      if (!(margin > 0.0) || !(anchor_scale_ > 0.0)) return std::nullopt;
      const double eps = 0.5 * margin / anchor_scale_;
      bool found = false;
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd nudged = beta;
        nudged[a] = sign * eps;
        if (nonsmooth_objective(data_, nudged) == value) {
          beta = std::move(nudged);
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    }
    Eigen::VectorXd normalized = beta / std::abs(beta[a]);
    normalized[a] = beta[a] > 0.0 ? 1.0 : -1.0;
    if (!normalized.allFinite() || nonsmooth_objective(data_, normalized) != value) return std::nullopt;
    return normalized;
  }

  const Dataset& data_;
  double anchor_scale_ = 0.0;
  std::optional<OracleResult> best_;
  std::uint64_t count_ = 0;
};

// Rays orthogonal to the points in `subset`, both orientations, with the
// boundary points placed on whichever side raises M_n.
void offer_hyperplane(const Dataset& data, const std::vector<Eigen::Index>& subset,
                      const Eigen::VectorXd& gain, CandidateSearch& search) {
  const auto& x = data.covariates();
  const auto p = data.dimension();
  const auto k = static_cast<Eigen::Index>(subset.size());

  Eigen::VectorXd direction;
  Eigen::MatrixXd boundary(k, p);
  if (k == 0) {
    direction = Eigen::VectorXd::Unit(p, 0);
  } else {
    for (Eigen::Index r = 0; r < k; ++r) boundary.row(r) = x.row(subset[static_cast<std::size_t>(r)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(boundary);
    if (lu.rank() != k) return;
    const Eigen::MatrixXd kernel = lu.kernel();
    if (kernel.cols() != 1) return;
    direction = kernel.col(0).normalized();
  }

  // Least-norm push w with xᵢᵀw = ±1 on the boundary points.
  Eigen::VectorXd push = Eigen::VectorXd::Zero(p);
  if (k > 0) {
    Eigen::VectorXd side(k);
    for (Eigen::Index r = 0; r < k; ++r) side[r] = gain[subset[static_cast<std::size_t>(r)]] > 0.0 ? 1.0 : -1.0;
    const Eigen::MatrixXd gram = boundary * boundary.transpose();
    push = boundary.transpose() * gram.ldlt().solve(side);
  }

  const Eigen::VectorXd margin = x * direction;
  const Eigen::VectorXd shift = x * push;
  const double tiny = 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff());
  double eps = 1.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (std::find(subset.begin(), subset.end(), i) != subset.end()) continue;
    if (std::abs(margin[i]) <= tiny) continue;
    if (shift[i] != 0.0) eps = std::min(eps, 0.5 * std::abs(margin[i]) / std::abs(shift[i]));
  }
  for (double orientation : {1.0, -1.0}) {
    search.offer(orientation * direction + eps * push);
  }
}

}  // namespace

OracleResult exact_nonsmooth_argmax(const Dataset& data, const OracleLimits& limits) {
  const auto n = data.size();
  const auto p = data.dimension();
  if (n > limits.max_n) {
    throw ValidationError("oracle: n = " + std::to_string(n) + " exceeds max_n = " + std::to_string(limits.max_n));
  }
  if (p > limits.max_p) {
    throw ValidationError("oracle: p = " + std::to_string(p) + " exceeds max_p = " + std::to_string(limits.max_p));
  }
  const auto anchor = data.covariates().col(data.anchor_index());
  if (anchor.minCoeff() == anchor.maxCoeff()) throw ValidationError("oracle: degenerate (constant) anchor column");
  const double log_work = log_binomial(static_cast<double>(n), static_cast<double>(p)) + std::log(static_cast<double>(n));
  if (log_work > std::log(limits.budget)) {
    throw ValidationError("oracle: enumeration budget exceeded (C(n,p)·n ≈ " + std::to_string(std::exp(log_work)) +
                          " > " + std::to_string(limits.budget) + ")");
  }

  Eigen::VectorXd gain(n);
  for (Eigen::Index i = 0; i < n; ++i) gain[i] = (2.0 * data.treatment()[i] - 1.0) * data.outcome()[i];

  CandidateSearch search(data);
  for (Eigen::Index j = 0; j < p; ++j) {
    search.offer(Eigen::VectorXd::Unit(p, j));
    search.offer(-Eigen::VectorXd::Unit(p, j));
  }

  const auto k = static_cast<std::size_t>(p - 1);
  std::vector<Eigen::Index> subset(k);
  for (std::size_t r = 0; r < k; ++r) subset[r] = static_cast<Eigen::Index>(r);
  for (;;) {
    offer_hyperplane(data, subset, gain, search);
    // next combination in lexicographic order
    std::size_t r = k;
    while (r > 0 && subset[r - 1] == n - static_cast<Eigen::Index>(k - r + 1)) --r;
    if (r == 0) break;
    ++subset[r - 1];
    for (std::size_t s = r; s < k; ++s) subset[s] = subset[s - 1] + 1;
  }

  // Never-treat rule (β = 0); only reported when nothing normalizable ties it.
  const double never = 0.0;
  auto best = search.best();
  if (!best || never > best->value) {
    return OracleResult{Eigen::VectorXd::Zero(p), never, false, search.count() + 1};
  }
  best->candidates = search.count() + 1;
  return *best;
}

ConstantPolicyValues constant_policy_values(const Dataset& data) {
  const auto& a = data.treatment();
  const auto& y = data.outcome();
  const double scale = 2.0 / static_cast<double>(data.size());
  ConstantPolicyValues values;
  values.treat_all = scale * a.dot(y);
  values.treat_none = scale * (Eigen::VectorXd::Ones(a.size()) - a).dot(y);
  values.randomized = 0.5 * (values.treat_all + values.treat_none);
  return values;
}

}  // namespace otr
