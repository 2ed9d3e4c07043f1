#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "impalloc/importance.hpp"
#include "impalloc/model.hpp"

namespace impalloc {

struct ErrorReport {
  /// sum_i p_i W_i D_f(L_i, l_i), not normalized.
  double weighted_error = 0.0;
  /// Relative weighted reconstruction error, in [0, 1].
  double rwre = 0.0;
  std::vector<double> per_class_distortion;
};

/// Worst-case relative truncation error (r^{L-l} - 1) / (r^L - 1) of keeping
/// the top l of L radix-r digits. Real l is accepted for the continuous
/// relaxation. Exact (correctly rounded) when l is integral and r^L < 2^53.
/// L = 0 yields 0: there is nothing to lose.
double digit_distortion(std::uint32_t L, double l, int r);

/// Limit of digit_distortion as L -> infinity: r^{-l}.
double unbounded_distortion(double l, int r);

/// Relative weighted reconstruction error of arbitrary lengths. Throws
/// InfeasiblePlan when a length leaves [0, L_i] or the budget is overrun.
ErrorReport rwre(const ClassDistribution& dist, const ImportanceWeights& weights,
                 const StorageConfig& config, std::span<const double> lengths);

/// Error of the continuous lengths of a plan.
ErrorReport rwre(const ClassDistribution& dist, const ImportanceWeights& weights,
                 const StorageConfig& config, const AllocationPlan& plan);

/// Error of the rounded (integer) lengths of a plan; requires round_plan().
ErrorReport rwre_rounded(const ClassDistribution& dist,
                         const ImportanceWeights& weights,
                         const StorageConfig& config, const AllocationPlan& plan);

/// Closed-form RWRE of the MIM-weighted ideal system when every class is
/// interior. Throws InteriorConditionViolated otherwise.
double rwre_interior_closed_form(const ClassDistribution& dist, double varpi,
                                 std::uint32_t L, double T, int r);

/// Closed-form RWRE of the NMIM-weighted quantification system,
/// e^{n-1-NMIM(P)} r^{-T}. Requires n <= T ln r.
double rwre_nmim_closed_form(const ClassDistribution& dist, double T, int r);

}  // namespace impalloc
