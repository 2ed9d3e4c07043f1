#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "impalloc/model.hpp"

namespace impalloc {

struct Interval {
  double lower;
  double upper;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
  bool empty() const noexcept { return lower > upper; }
};

struct InteriorCheck {
  bool holds = false;
  /// Unclipped closed-form lengths T + varpi (gamma_p - p_i) / ln r.
  std::vector<double> lengths;
  /// min(l_i, L - l_i) per class; negative where the class would clip.
  std::vector<double> margins;
};

/// Do all MIM closed-form lengths lie in [0, L]?
InteriorCheck interior_condition_check(const ClassDistribution& dist,
                                       double varpi, std::uint32_t L, double T,
                                       int r);

/// Importance coefficients for which every distribution stays interior:
/// [max(4 ln r (T - L), -T ln r), min(4 T ln r, ln r (L - T))].
Interval sufficient_varpi_range(double T, std::uint32_t L, int r);

/// The same range with the lower term written -T / ln r. Kept to quantify the
/// difference; not sufficient for r != e.
Interval sufficient_varpi_range_as_printed(double T, std::uint32_t L, int r);

/// l_i = T + varpi (gamma_p - p_i) / ln r. Throws InteriorConditionViolated
/// when some length would leave [0, L].
std::vector<double> closed_form_interior_lengths(const ClassDistribution& dist,
                                                 double varpi, double T, int r,
                                                 std::uint32_t L);

/// Unbounded-length variant: only the lower clip is checked.
std::vector<double> closed_form_interior_lengths(const ClassDistribution& dist,
                                                 double varpi, double T, int r);

struct RwreBounds {
  double delta1;  ///< RWRE at the smallest interior-admissible Delta = L - T
  double delta2;  ///< RWRE at the largest interior-admissible Delta
  Interval compressed_range;  ///< admissible Delta interval
};

/// Range of the interior closed-form RWRE over all admissible budgets.
RwreBounds rwre_bounds(const ClassDistribution& dist, double varpi,
                       std::uint32_t L, int r);

/// Largest Delta = L - T whose interior RWRE stays at or below delta.
/// Throws DeltaOutOfRange unless delta1 <= delta <= delta2.
double max_compressed_size(const ClassDistribution& dist, double varpi,
                           std::uint32_t L, int r, double delta);

/// ln(1 + delta (r^L - 1)) / ln r: the bound reached by uniform data or
/// varpi = 0.
double max_compressed_size_lower_bound(std::uint32_t L, int r, double delta);

/// l_i = T + 1/(p_i ln r) - n / ln r for NMIM weights, unbounded lengths.
std::vector<double> nmim_interior_lengths(const ClassDistribution& dist,
                                          double T, int r);

/// Probabilities for which the NMIM interior length stays within [0, L];
/// pass std::nullopt for unbounded lengths (lower bound 0).
Interval nmim_interior_prob_interval(std::size_t n, std::optional<std::uint32_t> L,
                                     double T, int r);

struct StorageTarget {
  double budget;   ///< minimum T meeting the target
  bool clipped;    ///< raised to the closed-form floor n / ln r
};

/// Minimum budget for which the NMIM closed-form RWRE is at most delta.
/// Requires 0 < delta <= r^{-n}.
StorageTarget min_storage_for_target_nmim(const ClassDistribution& dist,
                                          double delta, int r);

struct MonotonicityViolation {
  double varpi_a;
  double varpi_b;
  double rwre_a;
  double rwre_b;
  const char* rule;
};

struct MonotonicityReport {
  std::vector<double> varpi;
  std::vector<double> rwre;
  /// (r^{L-T} - 1) / (r^L - 1)
  double zero_coefficient_value = 0.0;
  std::vector<MonotonicityViolation> violations;
};

/// Solves the MIM-weighted ideal system at every grid point and checks that
/// RWRE falls for varpi > 0, rises for varpi < 0 and never exceeds its
/// varpi = 0 value (tolerance 1e-9).
MonotonicityReport evaluate_varpi_monotonicity(
    const ClassDistribution& dist, std::uint32_t L, double T, int r,
    std::span<const double> varpi_grid);

}  // namespace impalloc
