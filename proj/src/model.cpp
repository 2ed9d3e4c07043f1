#include "impalloc/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace impalloc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::NonPositiveProbability: return "NonPositiveProbability";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::RadixTooSmall: return "RadixTooSmall";
    case ErrorCode::NegativeBudget: return "NegativeBudget";
    case ErrorCode::KindLengthMismatch: return "KindLengthMismatch";
    case ErrorCode::LengthCountMismatch: return "LengthCountMismatch";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InfeasiblePlan: return "InfeasiblePlan";
    case ErrorCode::BudgetExceedsCapacity: return "BudgetExceedsCapacity";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InteriorConditionViolated:
      return "InteriorConditionViolated";
    case ErrorCode::PreconditionBudgetTooSmall:
      return "PreconditionBudgetTooSmall";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::NoInteriorClass: return "NoInteriorClass";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ClassDistribution::ClassDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] < probs_[argmin_]) argmin_ = i;
    if (probs_[i] > probs_[argmax_]) argmax_ = i;
  }
}

namespace {

void check_positive(const std::vector<double>& probs) {
  if (probs.empty()) throw Error(ErrorCode::Empty, "distribution has no classes");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0) || !std::isfinite(probs[i])) {
      std::ostringstream msg;
      msg << "p[" << i << "] = " << probs[i] << " is not a positive number";
      throw Error(ErrorCode::NonPositiveProbability, msg.str());
    }
  }
}

}  // namespace

ClassDistribution normalize_distribution(std::vector<double> weights) {
  check_positive(weights);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= sum;
  return ClassDistribution(std::move(weights));
}

ClassDistribution validate_distribution(std::vector<double> probs) {
  check_positive(probs);
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "probabilities sum to " << sum;
    throw Error(ErrorCode::NotNormalized, msg.str());
  }
  if (sum != 1.0) {
    for (double& p : probs) p /= sum;
  }
  return ClassDistribution(std::move(probs));
}

StorageConfig make_config(int radix, LengthSpec lengths, double budget,
                          SystemKind kind) {
  if (radix < 2) {
    throw Error(ErrorCode::RadixTooSmall,
                "radix " + std::to_string(radix) + " < 2");
  }
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw Error(ErrorCode::NegativeBudget,
                "budget must be a finite nonnegative number");
  }
  const bool ok =
      (kind == SystemKind::General &&
       std::holds_alternative<PerClassLength>(lengths)) ||
      (kind == SystemKind::Ideal &&
       std::holds_alternative<UniformLength>(lengths)) ||
      (kind == SystemKind::Quantification &&
       std::holds_alternative<UnboundedLength>(lengths));
  if (!ok) {
    throw Error(ErrorCode::KindLengthMismatch,
                "general needs per-class lengths, ideal a uniform length, "
                "quantification unbounded lengths");
  }
  if (const auto* per = std::get_if<PerClassLength>(&lengths);
      per && per->lengths.empty()) {
    throw Error(ErrorCode::Empty, "per-class length list is empty");
  }
  return StorageConfig(radix, std::move(lengths), budget, kind);
}

double StorageConfig::length_of(std::size_t i) const {
  return std::visit(
      [i](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, UniformLength>) {
          return spec.length;
        } else if constexpr (std::is_same_v<T, PerClassLength>) {
          return spec.lengths.at(i);
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      lengths_);
}

std::vector<double> StorageConfig::expanded_lengths(std::size_t n) const {
  if (const auto* per = std::get_if<PerClassLength>(&lengths_);
      per && per->lengths.size() != n) {
    throw Error(ErrorCode::LengthCountMismatch,
                std::to_string(per->lengths.size()) + " lengths for " +
                    std::to_string(n) + " classes");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = length_of(i);
  return out;
}

double StorageConfig::capacity(const ClassDistribution& dist) const {
  if (unbounded()) return std::numeric_limits<double>::infinity();
  const auto lengths = expanded_lengths(dist.size());
  double cap = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) cap += dist[i] * lengths[i];
  return cap;
}

StorageConfig StorageConfig::with_budget(double budget) const {
  return make_config(radix_, lengths_, budget, kind_);
}

void check_compatible(const ClassDistribution& dist,
                      const StorageConfig& config) {
  const double cap = config.capacity(dist);
  // Capacity is a floating-point sum; allow its rounding error.
  if (config.budget() > cap * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "budget " << config.budget() << " exceeds capacity " << cap;
    throw Error(ErrorCode::BudgetExceedsCapacity, msg.str());
  }
}

}  // namespace impalloc
