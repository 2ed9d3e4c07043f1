// Recursive storage space allocation for the ideal system.
//
// Classes are sorted by decreasing weight. A node [kmin, kmax] assumes every
// class before kmin is saturated at L and every class after kmax is empty; the
// budget left for the node is therefore a function of kmin alone, which lets
// the recursion be memoized on (kmin, kmax).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "impalloc/allocator.hpp"

namespace impalloc {

namespace {

constexpr double kSlack = 1e-12;

struct Branch {
  std::vector<double> lengths;  // sorted order, active classes only
  double objective = 0.0;       // sum p_i W_i r^{-l_i}, shifted
  double level = 0.0;
};

class RecursiveAllocator {
 public:
  RecursiveAllocator(std::vector<double> probs, std::vector<double> log_weights,
                     double L, double T, double lr)
      : p_(std::move(probs)), lw_(std::move(log_weights)), L_(L), T_(T),
        lr_(lr) {
    shift_ = lw_.empty() ? 0.0 : *std::max_element(lw_.begin(), lw_.end());
  }

  std::optional<Branch> run() {
    if (p_.empty()) return Branch{};
    return phi(0, p_.size() - 1);
  }

 private:
  // Budget left once classes [0, kmin) are saturated.
  double budget_at(std::size_t kmin) const {
    double t = T_;
    for (std::size_t i = 0; i < kmin; ++i) t -= p_[i] * L_;
    return t;
  }

  Branch assemble(std::size_t kmin, std::size_t kmax,
                  const std::vector<double>& middle, double level) const {
    Branch b;
    b.level = level;
    b.lengths.assign(p_.size(), 0.0);
    for (std::size_t i = 0; i < kmin; ++i) b.lengths[i] = L_;
    for (std::size_t i = kmin; i <= kmax; ++i) b.lengths[i] = middle[i - kmin];
    for (std::size_t i = 0; i < p_.size(); ++i) {
      b.objective +=
          std::exp(std::log(p_[i]) + lw_[i] - shift_ - b.lengths[i] * lr_);
    }
    return b;
  }

  std::optional<Branch> phi(std::size_t kmin, std::size_t kmax) {
    const auto key = std::make_pair(kmin, kmax);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto result = compute(kmin, kmax);
    memo_.emplace(key, result);
    return result;
  }

  std::optional<Branch> compute(std::size_t kmin, std::size_t kmax) {
    const double t = budget_at(kmin);
    double mass = 0.0, mean_log = 0.0;
    for (std::size_t i = kmin; i <= kmax; ++i) {
      mass += p_[i];
      mean_log += p_[i] * lw_[i];
    }
    // f(i) = t / mass + ln W_i / ln r - sum p_j ln W_j / (ln r mass)
    const double level = t / mass - mean_log / (lr_ * mass);
    std::vector<double> middle;
    bool inside = true;
    for (std::size_t i = kmin; i <= kmax; ++i) {
      const double l = level + lw_[i] / lr_;
      inside = inside && l >= -kSlack && l <= L_ + kSlack;
      middle.push_back(std::clamp(l, 0.0, L_));
    }
    if (inside) return assemble(kmin, kmax, middle, level);

    if (kmax > kmin) {
      // (1) empty the least important class; (2) saturate the most important.
      auto first = phi(kmin, kmax - 1);
      std::optional<Branch> second;
      if (t - p_[kmin] * L_ >= -kSlack) second = phi(kmin + 1, kmax);
      if (first && second) {
        return first->objective <= second->objective ? first : second;
      }
      return first ? first : second;
    }

    const double l = t / p_[kmin];
    if (l < -kSlack || l > L_ + kSlack) return std::nullopt;
    return assemble(kmin, kmax, {std::clamp(l, 0.0, L_)}, l - lw_[kmin] / lr_);
  }

  std::vector<double> p_, lw_;
  double L_, T_, lr_;
  double shift_ = 0.0;
  std::map<std::pair<std::size_t, std::size_t>, std::optional<Branch>> memo_;
};

}  // namespace

AllocationPlan solve_recursive(const ClassDistribution& dist,
                               const ImportanceWeights& weights,
                               const StorageConfig& config) {
  if (weights.size() != dist.size()) {
    throw Error(ErrorCode::InvalidWeights, "weight count differs from class count");
  }
  const auto* uniform = std::get_if<UniformLength>(&config.lengths());
  if (!uniform) {
    throw Error(ErrorCode::KindLengthMismatch,
                "recursive solver needs a uniform original length");
  }
  check_compatible(dist, config);
  const double L = uniform->length;
  const double T = config.budget();
  const double lr = std::log(static_cast<double>(config.radix()));
  const auto logw = weights.log_values();

  // Zero-weight classes get nothing and are left out of the recursion.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (std::isfinite(logw[i]) && L > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return logw[a] > logw[b]; });

  std::vector<double> probs, lws;
  double active_capacity = 0.0;
  for (std::size_t i : order) {
    probs.push_back(dist[i]);
    lws.push_back(logw[i]);
    active_capacity += dist[i] * L;
  }

  AllocationPlan plan;
  plan.budget = T;
  plan.continuous_lengths.assign(dist.size(), 0.0);
  double level = 0.0;
  if (T >= active_capacity) {
    for (std::size_t i : order) plan.continuous_lengths[i] = L;
    level = order.empty() ? 0.0 : L - lws.back() / lr;
  } else {
    RecursiveAllocator solver(probs, lws, L, T, lr);
    auto best = solver.run();
    if (!best) {
      throw Error(ErrorCode::NoConvergence, "no feasible branch found");
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
      plan.continuous_lengths[order[k]] = best->lengths[k];
    }
    level = best->level;
  }

  plan.water_level = level;
  plan.multiplier = std::exp(std::log(lr) - level * lr);
  if (L > 0.0) plan.multiplier /= -std::expm1(-L * lr);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double l = plan.continuous_lengths[i];
    plan.achieved_budget += dist[i] * l;
    if (!std::isfinite(logw[i]) || l <= 0.0) {
      plan.zero_set.push_back(i);
    } else if (l >= L) {
      plan.saturated_set.push_back(i);
    } else {
      plan.interior_set.push_back(i);
    }
  }
  return plan;
}

}  // namespace impalloc
