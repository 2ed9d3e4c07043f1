#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "impalloc/error.hpp"

namespace impalloc {

/// Probabilities of the event classes in a data sequence. Immutable once
/// validated; construct through validate_distribution().
class ClassDistribution {
 public:
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::size_t size() const noexcept { return probs_.size(); }

  /// Index of the smallest probability (lowest index on ties).
  std::size_t argmin() const noexcept { return argmin_; }
  /// Index of the largest probability (lowest index on ties).
  std::size_t argmax() const noexcept { return argmax_; }

  double min_prob() const noexcept { return probs_[argmin_]; }
  double max_prob() const noexcept { return probs_[argmax_]; }

 private:
  friend ClassDistribution validate_distribution(std::vector<double> probs);
  friend ClassDistribution normalize_distribution(std::vector<double> weights);
  explicit ClassDistribution(std::vector<double> probs);

  std::vector<double> probs_;
  std::size_t argmin_ = 0;
  std::size_t argmax_ = 0;
};

/// Tolerance on |sum(p) - 1| accepted by validate_distribution.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Checks positivity and normalization; inputs within tolerance are
/// renormalized by their sum.
ClassDistribution validate_distribution(std::vector<double> probs);

/// Divides positive weights by their sum, whatever it is.
ClassDistribution normalize_distribution(std::vector<double> weights);

enum class SystemKind { General, Ideal, Quantification };

struct UniformLength {
  std::uint32_t length;
};
struct PerClassLength {
  std::vector<std::uint32_t> lengths;
};
struct UnboundedLength {};

using LengthSpec = std::variant<UniformLength, PerClassLength, UnboundedLength>;

/// Radix, original record lengths, budget (expected digits per record) and
/// the storage system kind.
class StorageConfig {
 public:
  int radix() const noexcept { return radix_; }
  const LengthSpec& lengths() const noexcept { return lengths_; }
  double budget() const noexcept { return budget_; }
  SystemKind kind() const noexcept { return kind_; }

  bool unbounded() const noexcept { return kind_ == SystemKind::Quantification; }

  /// Original length of class i; +inf for the quantification system.
  double length_of(std::size_t i) const;

  /// Per-class original lengths expanded to n classes.
  std::vector<double> expanded_lengths(std::size_t n) const;

  /// sum_i p_i L_i, +inf when unbounded. Throws LengthCountMismatch when
  /// per-class lengths do not match the distribution size.
  double capacity(const ClassDistribution& dist) const;

  /// Copy with a different budget, re-validated.
  StorageConfig with_budget(double budget) const;

 private:
  friend StorageConfig make_config(int radix, LengthSpec lengths,
                                   double budget, SystemKind kind);
  StorageConfig(int radix, LengthSpec lengths, double budget, SystemKind kind)
      : radix_(radix), lengths_(std::move(lengths)), budget_(budget),
        kind_(kind) {}

  int radix_;
  LengthSpec lengths_;
  double budget_;
  SystemKind kind_;
};

StorageConfig make_config(int radix, LengthSpec lengths, double budget,
                          SystemKind kind);

/// Throws BudgetExceedsCapacity / LengthCountMismatch when the config cannot
/// be paired with the distribution.
void check_compatible(const ClassDistribution& dist,
                      const StorageConfig& config);

/// Result of an allocation. Index sets partition {0..n-1}.
struct AllocationPlan {
  std::vector<double> continuous_lengths;
  /// Empty until round_plan() populates it.
  std::vector<std::int64_t> integer_lengths;
  /// Lagrange multiplier of the budget constraint (lambda of the solved
  /// problem form).
  double multiplier = 0.0;
  /// Water surface height beta; interior classes get beta - log_r(1/W_i).
  double water_level = 0.0;
  std::vector<std::size_t> interior_set;
  std::vector<std::size_t> saturated_set;
  std::vector<std::size_t> zero_set;
  double budget = 0.0;
  double achieved_budget = 0.0;
  /// sum_i p_i l*_i; NaN until rounded.
  double rounded_budget = std::numeric_limits<double>::quiet_NaN();

  std::size_t size() const noexcept { return continuous_lengths.size(); }
};

}  // namespace impalloc
