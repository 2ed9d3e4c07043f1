#pragma once

#include <span>
#include <vector>

#include "impalloc/importance.hpp"
#include "impalloc/model.hpp"

namespace impalloc {

enum class Algorithm { Bisection, Recursive, Both };

struct SolverOptions {
  /// Bound on |sum_i p_i l_i - T|.
  double budget_tolerance = 1e-9;
  int max_bisection_iters = 200;
  /// Recursive is only available for the ideal system; Both runs the two
  /// solvers, checks that their errors agree and returns the bisection plan.
  Algorithm algorithm = Algorithm::Bisection;
};

/// Outcome of the water-level search: the level beta solving
/// sum_i p_i clip(beta + offset_i, 0, cap_i) = T, and the class partition at
/// that level.
struct WaterLevel {
  double level = 0.0;
  std::vector<double> lengths;
  std::vector<std::size_t> interior_set;
  std::vector<std::size_t> saturated_set;
  std::vector<std::size_t> zero_set;
  int iterations = 0;
};

/// Monotone bisection on the water level of the clipped map
/// l_i(beta) = clip(beta + offsets[i], 0, caps[i]), followed by an exact
/// re-solve on the discovered partition. Classes with offset -inf are held
/// at 0. caps may be +inf. Throws NoConvergence when the budget cannot be met
/// within opts.budget_tolerance.
WaterLevel water_level_bisection(std::span<const double> probs,
                                 std::span<const double> offsets,
                                 std::span<const double> caps, double T,
                                 const SolverOptions& opts = {});

/// Problem P1: per-class original lengths.
AllocationPlan solve_general(const ClassDistribution& dist,
                             const ImportanceWeights& weights,
                             const StorageConfig& config,
                             const SolverOptions& opts = {});

/// Problem P2: uniform original length; reports the water level beta.
AllocationPlan solve_ideal(const ClassDistribution& dist,
                           const ImportanceWeights& weights,
                           const StorageConfig& config,
                           const SolverOptions& opts = {});

/// Problem P3: unbounded original lengths.
AllocationPlan solve_quantification(const ClassDistribution& dist,
                                    const ImportanceWeights& weights,
                                    const StorageConfig& config,
                                    const SolverOptions& opts = {});

/// Recursive storage space allocation over weight-sorted classes (ideal
/// system only). Among the two sub-branches it keeps the one with the smaller
/// error. Output is in the caller's class order.
AllocationPlan solve_recursive(const ClassDistribution& dist,
                               const ImportanceWeights& weights,
                               const StorageConfig& config);

/// Dispatches on config.kind() and opts.algorithm.
AllocationPlan solve(const ClassDistribution& dist,
                     const ImportanceWeights& weights,
                     const StorageConfig& config, const SolverOptions& opts = {});

/// Populates integer_lengths with l*_i = min(max(floor(l_i), 0), L_i) and
/// rounded_budget with sum_i p_i l*_i. Lengths within 1e-9 of an integer are
/// snapped to it before flooring.
AllocationPlan round_plan(AllocationPlan plan, const ClassDistribution& dist,
                          const StorageConfig& config);

}  // namespace impalloc
