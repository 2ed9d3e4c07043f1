#include "impalloc/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "impalloc/distortion.hpp"

namespace impalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Level {
  std::vector<double> lengths;
  double used = 0.0;
};

bool active(double offset, double cap) { return std::isfinite(offset) && cap > 0.0; }

Level evaluate(std::span<const double> probs, std::span<const double> offsets,
               std::span<const double> caps, double beta) {
  Level out;
  out.lengths.assign(probs.size(), 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!active(offsets[i], caps[i])) continue;
    out.lengths[i] = std::clamp(beta + offsets[i], 0.0, caps[i]);
    out.used += probs[i] * out.lengths[i];
  }
  return out;
}

// Level that meets the budget exactly on the partition observed at `beta`.
double resolve_on_partition(std::span<const double> probs,
                            std::span<const double> offsets,
                            std::span<const double> caps, double T,
                            double beta) {
  double interior_mass = 0.0, interior_offset = 0.0, saturated = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!active(offsets[i], caps[i])) continue;
    const double raw = beta + offsets[i];
    if (raw > caps[i]) {
      saturated += probs[i] * caps[i];
    } else if (raw >= 0.0) {
      interior_mass += probs[i];
      interior_offset += probs[i] * offsets[i];
    }
  }
  if (interior_mass <= 0.0) return beta;
  return (T - saturated - interior_offset) / interior_mass;
}

// Classes sitting exactly on a bound count as zero or saturated.
void partition(std::span<const double> caps, WaterLevel& out) {
  for (std::size_t i = 0; i < caps.size(); ++i) {
    const double l = out.lengths[i];
    if (l <= 0.0 || caps[i] <= 0.0) {
      out.zero_set.push_back(i);
    } else if (l >= caps[i]) {
      out.saturated_set.push_back(i);
    } else {
      out.interior_set.push_back(i);
    }
  }
}

}  // namespace

WaterLevel water_level_bisection(std::span<const double> probs,
                                 std::span<const double> offsets,
                                 std::span<const double> caps, double T,
                                 const SolverOptions& opts) {
  if (!(opts.budget_tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "budget_tolerance must be > 0");
  }
  if (T < 0.0) throw Error(ErrorCode::NegativeBudget, "budget is negative");

  double lo = kInf, hi = -kInf, full = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!active(offsets[i], caps[i])) continue;
    any = true;
    lo = std::min(lo, -offsets[i]);
    hi = std::max(hi, std::isfinite(caps[i]) ? caps[i] - offsets[i]
                                             : T - offsets[i]);
    full += probs[i] * caps[i];
  }

  WaterLevel out;
  if (!any) {
    out.lengths.assign(probs.size(), 0.0);
    partition(caps, out);
    return out;
  }

  double beta;
  if (T <= 0.0) {
    beta = lo;
  } else if (T >= full) {
    // Everything saturates; any leftover budget cannot be spent.
    beta = hi;
  } else {
    while (evaluate(probs, offsets, caps, hi).used < T) hi += (hi - lo) + 1.0;
    beta = 0.5 * (lo + hi);
    for (int it = 0; it < opts.max_bisection_iters; ++it) {
      ++out.iterations;
      beta = 0.5 * (lo + hi);
      const double used = evaluate(probs, offsets, caps, beta).used;
      if (std::abs(used - T) <= 1e-3 * opts.budget_tolerance) break;
      (used < T ? lo : hi) = beta;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(beta))) {
        break;
      }
    }
    const double exact = resolve_on_partition(probs, offsets, caps, T, beta);
    if (std::abs(evaluate(probs, offsets, caps, exact).used - T) <=
        std::abs(evaluate(probs, offsets, caps, beta).used - T)) {
      beta = exact;
    }
  }

  auto level = evaluate(probs, offsets, caps, beta);
  const double target = std::min(T, full);
  if (std::abs(level.used - target) > opts.budget_tolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "budget residual " << level.used - target << " after "
        << out.iterations << " iterations";
    throw Error(ErrorCode::NoConvergence, msg.str());
  }
  out.level = beta;
  out.lengths = std::move(level.lengths);
  // Rounding in beta + offset must not leave a class a few ulps off a bound.
  for (std::size_t i = 0; i < out.lengths.size(); ++i) {
    double& l = out.lengths[i];
    const double ulps = 8.0 * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, std::abs(beta));
    if (l <= ulps) l = 0.0;
    if (std::isfinite(caps[i]) && l >= caps[i] - ulps) l = caps[i];
  }
  partition(caps, out);
  return out;
}

namespace {

double log_radix(const StorageConfig& config) {
  return std::log(static_cast<double>(config.radix()));
}

// Offsets are shifted by their probability-weighted mean before the search so
// that the solved level stays O(T); `shift` undoes it.
AllocationPlan solve_with_offsets(const ClassDistribution& dist,
                                  std::vector<double> offsets,
                                  std::vector<double> caps, double T,
                                  double lr, const SolverOptions& opts) {
  double mass = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (!active(offsets[i], caps[i])) continue;
    mass += dist[i];
    mean += dist[i] * offsets[i];
  }
  const double shift = mass > 0.0 ? mean / mass : 0.0;
  for (double& o : offsets) o -= shift;

  auto level = water_level_bisection(dist.probs(), offsets, caps, T, opts);

  AllocationPlan plan;
  plan.continuous_lengths = std::move(level.lengths);
  plan.interior_set = std::move(level.interior_set);
  plan.saturated_set = std::move(level.saturated_set);
  plan.zero_set = std::move(level.zero_set);
  plan.water_level = level.level - shift;
  // beta = (ln ln r - ln lambda) / ln r
  plan.multiplier = std::exp(std::log(lr) - plan.water_level * lr);
  plan.budget = T;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    plan.achieved_budget += dist[i] * plan.continuous_lengths[i];
  }
  return plan;
}

void check_weights(const ClassDistribution& dist, const ImportanceWeights& w) {
  if (w.size() != dist.size()) {
    throw Error(ErrorCode::InvalidWeights,
                std::to_string(w.size()) + " weights for " +
                    std::to_string(dist.size()) + " classes");
  }
}

}  // namespace

AllocationPlan solve_general(const ClassDistribution& dist,
                             const ImportanceWeights& weights,
                             const StorageConfig& config,
                             const SolverOptions& opts) {
  check_weights(dist, weights);
  if (config.unbounded()) {
    throw Error(ErrorCode::KindLengthMismatch,
                "general solver needs finite original lengths");
  }
  check_compatible(dist, config);
  const double lr = log_radix(config);
  auto caps = config.expanded_lengths(dist.size());
  std::vector<double> offsets(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    // (ln W_i - ln(1 - r^{-L_i})) / ln r
    offsets[i] = caps[i] > 0.0
                     ? (weights.log_values()[i] -
                        std::log(-std::expm1(-caps[i] * lr))) / lr
                     : -kInf;
  }
  return solve_with_offsets(dist, std::move(offsets), std::move(caps),
                            config.budget(), lr, opts);
}

AllocationPlan solve_ideal(const ClassDistribution& dist,
                           const ImportanceWeights& weights,
                           const StorageConfig& config,
                           const SolverOptions& opts) {
  check_weights(dist, weights);
  if (!std::holds_alternative<UniformLength>(config.lengths())) {
    throw Error(ErrorCode::KindLengthMismatch,
                "ideal solver needs a uniform original length");
  }
  check_compatible(dist, config);
  const double lr = log_radix(config);
  auto caps = config.expanded_lengths(dist.size());
  std::vector<double> offsets(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    offsets[i] = weights.log_values()[i] / lr;
  }
  const double L = caps.front();
  auto plan = solve_with_offsets(dist, std::move(offsets), std::move(caps),
                                 config.budget(), lr, opts);
  // The common 1 - r^{-L} factor is absorbed in beta; restore it in lambda.
  if (L > 0.0) plan.multiplier /= -std::expm1(-L * lr);
  return plan;
}

AllocationPlan solve_quantification(const ClassDistribution& dist,
                                    const ImportanceWeights& weights,
                                    const StorageConfig& config,
                                    const SolverOptions& opts) {
  check_weights(dist, weights);
  if (!config.unbounded()) {
    throw Error(ErrorCode::KindLengthMismatch,
                "quantification solver needs unbounded original lengths");
  }
  const double lr = log_radix(config);
  std::vector<double> caps(dist.size(), kInf);
  std::vector<double> offsets(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    offsets[i] = weights.log_values()[i] / lr;
  }
  return solve_with_offsets(dist, std::move(offsets), std::move(caps),
                            config.budget(), lr, opts);
}

AllocationPlan solve(const ClassDistribution& dist,
                     const ImportanceWeights& weights,
                     const StorageConfig& config, const SolverOptions& opts) {
  switch (config.kind()) {
    case SystemKind::General:
      if (opts.algorithm != Algorithm::Bisection) {
        throw Error(ErrorCode::InvalidArgument,
                    "the recursive solver handles the ideal system only");
      }
      return solve_general(dist, weights, config, opts);
    case SystemKind::Quantification:
      if (opts.algorithm != Algorithm::Bisection) {
        throw Error(ErrorCode::InvalidArgument,
                    "the recursive solver handles the ideal system only");
      }
      return solve_quantification(dist, weights, config, opts);
    case SystemKind::Ideal:
      break;
  }
  if (opts.algorithm == Algorithm::Recursive) {
    return solve_recursive(dist, weights, config);
  }
  auto plan = solve_ideal(dist, weights, config, opts);
  if (opts.algorithm == Algorithm::Both) {
    const double a = rwre(dist, weights, config, plan).rwre;
    const double b =
        rwre(dist, weights, config, solve_recursive(dist, weights, config)).rwre;
    if (std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b))) {
      std::ostringstream msg;
      msg.precision(15);
      msg << "bisection RWRE " << a << " differs from recursive RWRE " << b;
      throw Error(ErrorCode::NoConvergence, msg.str());
    }
  }
  return plan;
}

AllocationPlan round_plan(AllocationPlan plan, const ClassDistribution& dist,
                          const StorageConfig& config) {
  constexpr double kSnap = 1e-9;
  const auto caps = config.expanded_lengths(plan.size());
  plan.integer_lengths.assign(plan.size(), 0);
  plan.rounded_budget = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    double l = plan.continuous_lengths[i];
    if (const double near = std::round(l); std::abs(l - near) <= kSnap) l = near;
    double floored = std::max(std::floor(l), 0.0);
    if (std::isfinite(caps[i])) floored = std::min(floored, caps[i]);
    plan.integer_lengths[i] = static_cast<std::int64_t>(floored);
    plan.rounded_budget += dist[i] * floored;
  }
  return plan;
}

}  // namespace impalloc
