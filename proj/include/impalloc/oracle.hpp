#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "impalloc/importance.hpp"
#include "impalloc/model.hpp"

namespace impalloc {

/// Result of an independent optimality check. Values are RWREs.
struct OracleReport {
  double optimum_value = 0.0;
  std::vector<double> optimum_plan;
  /// candidate RWRE minus optimum_value; never below -tolerance for a true
  /// optimum.
  double gap_vs_candidate = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Largest search space brute_force_integer will enumerate.
inline constexpr double kMaxBruteForceSpace = 1e7;

/// Exact minimizer of the RWRE over integer lengths 0 <= l_i <= L_i with
/// sum_i p_i l_i <= T. Throws SearchSpaceTooLarge beyond kMaxBruteForceSpace
/// vectors. When `candidate` is non-empty, gap_vs_candidate compares it.
OracleReport brute_force_integer(const ClassDistribution& dist,
                                 const ImportanceWeights& weights,
                                 const StorageConfig& config,
                                 std::span<const std::int64_t> candidate = {});

/// Samples budget-preserving transfers between random class pairs (in both
/// directions, shortened to stay within [0, L_i]) and fails if any lowers the
/// RWRE by more than 1e-9. Deterministic for a given seed.
bool perturbation_check(std::span<const double> lengths,
                        const ClassDistribution& dist,
                        const ImportanceWeights& weights,
                        const StorageConfig& config, int trials = 1000,
                        double step = 1e-3, std::uint64_t seed = 0);

/// KKT certificate of a continuous plan for the (unnormalized) weighted error.
struct KktReport {
  bool passed = false;
  /// Budget multiplier recovered from the interior classes.
  double multiplier = 0.0;
  /// Multipliers of l_i <= L_i; nonzero only on saturated classes.
  std::vector<double> mu;
  /// Multipliers of l_i >= 0; nonzero only on empty classes.
  std::vector<double> nu;
  /// Largest relative spread of the interior stationarity values.
  double stationarity_spread = 0.0;
  double worst_dual_violation = 0.0;
  double worst_slackness = 0.0;
  std::vector<std::size_t> interior;
};

/// Recovers the multiplier from interior classes and checks dual feasibility
/// and complementary slackness (tolerance 1e-8). Throws NoInteriorClass when
/// every class sits on a bound.
KktReport kkt_certify(std::span<const double> lengths,
                      const ClassDistribution& dist,
                      const ImportanceWeights& weights,
                      const StorageConfig& config);

/// Monte Carlo check of the truncation bound |a - a_hat| <= r^{L-l} - 1:
/// draws random L-digit numbers, keeps the top l digits, refills the rest at
/// random and returns the largest |a - a_hat| / (r^L - 1) observed. Throws
/// OutOfRange if any draw exceeds digit_distortion(L, l, r), or when r^L
/// does not fit in 64 bits.
double simulate_digit_truncation(std::uint32_t L, std::uint32_t l, int r,
                                 std::int64_t trials, std::uint64_t seed);

/// Cyclic pairwise-transfer descent at resolutions step * 2^k down to step,
/// until no transfer improves the RWRE. Throws InfeasiblePlan for an
/// infeasible starting point.
OracleReport grid_refine(const ClassDistribution& dist,
                         const ImportanceWeights& weights,
                         const StorageConfig& config,
                         std::span<const double> initial_lengths,
                         double step = 1e-5);

}  // namespace impalloc
