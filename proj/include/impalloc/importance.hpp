#pragma once

#include <span>
#include <variant>
#include <vector>

#include "impalloc/model.hpp"

namespace impalloc {

struct MimRule {
  double varpi;
};
struct NmimRule {};
struct ExplicitRule {};

using WeightRule = std::variant<MimRule, NmimRule, ExplicitRule>;

/// Per-class importance weights. Both the linear values and their natural
/// logarithms are kept: NMIM weights of common classes underflow to zero in
/// linear form while their logarithms stay finite, and the solvers work in the
/// log domain.
class ImportanceWeights {
 public:
  std::span<const double> values() const noexcept { return values_; }
  /// ln W_i; -inf exactly when W_i is a true zero (explicit weights only).
  std::span<const double> log_values() const noexcept { return log_values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  const WeightRule& rule() const noexcept { return rule_; }

  /// Weights taken as given; W_i >= 0 with at least one positive entry.
  static ImportanceWeights explicit_values(std::vector<double> values);

 private:
  friend ImportanceWeights mim_weights(const ClassDistribution&, double);
  friend ImportanceWeights nmim_weights(const ClassDistribution&);
  ImportanceWeights(std::vector<double> log_values, WeightRule rule);
  ImportanceWeights() = default;

  std::vector<double> values_;
  std::vector<double> log_values_;
  WeightRule rule_;
};

/// Scalar functionals of a distribution used by the analysis.
struct ImportanceFunctionals {
  double gamma_p;      ///< sum p_i^2
  double mim_value;    ///< ln sum p_i e^{varpi (1 - p_i)}
  double nmim_value;   ///< ln sum p_i e^{(1 - p_i) / p_i}
  double renyi2;       ///< -ln gamma_p
};

/// Numerically stable ln(sum_i e^{x_i}).
double log_sum_exp(std::span<const double> xs);

double gamma_p(const ClassDistribution& dist);

/// Same functionals evaluated on any positive vector, normalized or not.
double gamma_p(std::span<const double> probs);
double mim_functional(std::span<const double> probs, double varpi);
double nmim_functional(std::span<const double> probs);

/// Normalized MIM weights W_i = e^{varpi(1-p_i)} / sum_j e^{varpi(1-p_j)}.
ImportanceWeights mim_weights(const ClassDistribution& dist, double varpi);

/// Normalized NMIM weights W_i = e^{(1-p_i)/p_i} / sum_j e^{(1-p_j)/p_j}.
ImportanceWeights nmim_weights(const ClassDistribution& dist);

double mim_functional(const ClassDistribution& dist, double varpi);
double nmim_functional(const ClassDistribution& dist);

ImportanceFunctionals functionals(const ClassDistribution& dist, double varpi);

}  // namespace impalloc
