#include "impalloc/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "impalloc/analysis.hpp"

namespace impalloc {

namespace {

constexpr double kFeasibilityTolerance = 1e-9;

// r^k as an exact integer when it stays below 2^53, else 0.
std::uint64_t exact_power(int r, std::uint32_t k) {
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 53;
  std::uint64_t v = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    if (v > kLimit / static_cast<std::uint64_t>(r)) return 0;
    v *= static_cast<std::uint64_t>(r);
  }
  return v;
}

void require_feasible(const ClassDistribution& dist, const StorageConfig& config,
                      std::span<const double> lengths) {
  if (lengths.size() != dist.size()) {
    throw Error(ErrorCode::InfeasiblePlan,
                std::to_string(lengths.size()) + " lengths for " +
                    std::to_string(dist.size()) + " classes");
  }
  const auto caps = config.expanded_lengths(dist.size());
  double used = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const double l = lengths[i];
    if (!(l >= -kFeasibilityTolerance) ||
        l > caps[i] + kFeasibilityTolerance) {
      std::ostringstream msg;
      msg << "l[" << i << "] = " << l << " outside [0, " << caps[i] << "]";
      throw Error(ErrorCode::InfeasiblePlan, msg.str());
    }
    used += dist[i] * l;
  }
  const double T = config.budget();
  if (used > T + kFeasibilityTolerance * std::max(1.0, T)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "plan uses " << used << " digits per record, budget is " << T;
    throw Error(ErrorCode::InfeasiblePlan, msg.str());
  }
}

}  // namespace

double digit_distortion(std::uint32_t L, double l, int r) {
  if (r < 2) throw Error(ErrorCode::RadixTooSmall, "radix must be >= 2");
  if (!(l >= -kFeasibilityTolerance) || l > L + kFeasibilityTolerance) {
    std::ostringstream msg;
    msg << "length " << l << " outside [0, " << L << "]";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
  if (L == 0) return 0.0;
  l = std::clamp(l, 0.0, static_cast<double>(L));
  if (l == std::floor(l)) {
    const auto kept = static_cast<std::uint32_t>(l);
    if (const std::uint64_t full = exact_power(r, L); full != 0) {
      const std::uint64_t lost = exact_power(r, L - kept);
      return static_cast<double>(lost - 1) / static_cast<double>(full - 1);
    }
  }
  // r^{-l} (1 - r^{-(L-l)}) / (1 - r^{-L}); no overflow for any L.
  const double lr = std::log(static_cast<double>(r));
  const double len = static_cast<double>(L);
  return std::exp(-l * lr) * std::expm1(-(len - l) * lr) / std::expm1(-len * lr);
}

double unbounded_distortion(double l, int r) {
  if (!(l >= -kFeasibilityTolerance)) {
    throw Error(ErrorCode::OutOfRange, "negative length");
  }
  return std::exp(-std::max(l, 0.0) * std::log(static_cast<double>(r)));
}

ErrorReport rwre(const ClassDistribution& dist, const ImportanceWeights& weights,
                 const StorageConfig& config, std::span<const double> lengths) {
  if (weights.size() != dist.size()) {
    throw Error(ErrorCode::InvalidWeights, "weight count differs from class count");
  }
  require_feasible(dist, config, lengths);
  const std::size_t n = dist.size();
  const int r = config.radix();
  const auto logw = weights.log_values();

  ErrorReport out;
  out.per_class_distortion.resize(n);

  // Shifted log-domain mass p_i W_i so that tiny NMIM weights do not vanish
  // from both numerator and denominator at once.
  std::vector<double> log_mass(n);
  for (std::size_t i = 0; i < n; ++i) log_mass[i] = std::log(dist[i]) + logw[i];
  const double shift = *std::max_element(log_mass.begin(), log_mass.end());

  if (config.unbounded()) {
    const double lr = std::log(static_cast<double>(r));
    std::vector<double> num(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double l = std::max(lengths[i], 0.0);
      out.per_class_distortion[i] = unbounded_distortion(l, r);
      num[i] = log_mass[i] - l * lr;
      out.weighted_error += dist[i] * weights[i] * out.per_class_distortion[i];
    }
    out.rwre = std::exp(log_sum_exp(num) - log_sum_exp(log_mass));
    return out;
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto L = static_cast<std::uint32_t>(config.length_of(i));
    const double df = digit_distortion(L, lengths[i], r);
    out.per_class_distortion[i] = df;
    const double mass = std::exp(log_mass[i] - shift);
    num += mass * df;
    den += mass;
    out.weighted_error += dist[i] * weights[i] * df;
  }
  out.rwre = num / den;
  return out;
}

ErrorReport rwre(const ClassDistribution& dist, const ImportanceWeights& weights,
                 const StorageConfig& config, const AllocationPlan& plan) {
  return rwre(dist, weights, config, plan.continuous_lengths);
}

ErrorReport rwre_rounded(const ClassDistribution& dist,
                         const ImportanceWeights& weights,
                         const StorageConfig& config, const AllocationPlan& plan) {
  if (plan.integer_lengths.size() != plan.continuous_lengths.size()) {
    throw Error(ErrorCode::InfeasiblePlan, "plan has not been rounded");
  }
  std::vector<double> lengths(plan.integer_lengths.begin(),
                              plan.integer_lengths.end());
  return rwre(dist, weights, config, lengths);
}

double rwre_interior_closed_form(const ClassDistribution& dist, double varpi,
                                 std::uint32_t L, double T, int r) {
  const auto check = interior_condition_check(dist, varpi, L, T, r);
  if (!check.holds) {
    throw Error(ErrorCode::InteriorConditionViolated,
                "some class would be clipped; closed form does not apply");
  }
  const double lr = std::log(static_cast<double>(r));
  const double delta = static_cast<double>(L) - T;
  // e^{varpi(1-gamma)} r^Delta / sum_i p_i e^{varpi(1-p_i)} = e^{exponent}
  const double exponent =
      varpi * (1.0 - gamma_p(dist)) + delta * lr - mim_functional(dist, varpi);
  return std::expm1(exponent) / std::expm1(L * lr);
}

double rwre_nmim_closed_form(const ClassDistribution& dist, double T, int r) {
  const double lr = std::log(static_cast<double>(r));
  const double n = static_cast<double>(dist.size());
  if (!(n <= T * lr)) {
    std::ostringstream msg;
    msg << "closed form needs n <= T ln r (n = " << n << ", T ln r = "
        << T * lr << ")";
    throw Error(ErrorCode::PreconditionBudgetTooSmall, msg.str());
  }
  return std::exp(n - 1.0 - nmim_functional(dist) - T * lr);
}

}  // namespace impalloc
