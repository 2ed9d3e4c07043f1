#include "impalloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "impalloc/distortion.hpp"

namespace impalloc {

namespace {

// Per-class share of the RWRE: mass_i * D_f(L_i, l), mass normalized to 1.
class Objective {
 public:
  Objective(const ClassDistribution& dist, const ImportanceWeights& weights,
            const StorageConfig& config)
      : r_(config.radix()), caps_(config.expanded_lengths(dist.size())),
        unbounded_(config.unbounded()) {
    if (weights.size() != dist.size()) {
      throw Error(ErrorCode::InvalidWeights, "weight count differs from class count");
    }
    const auto logw = weights.log_values();
    std::vector<double> logm(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
      logm[i] = std::log(dist[i]) + logw[i];
    }
    const double total = log_sum_exp(logm);
    for (double lm : logm) mass_.push_back(std::exp(lm - total));
  }

  double term(std::size_t i, double l) const {
    if (mass_[i] == 0.0) return 0.0;
    const double df =
        unbounded_ ? unbounded_distortion(l, r_)
                   : digit_distortion(static_cast<std::uint32_t>(caps_[i]), l, r_);
    return mass_[i] * df;
  }

  double value(std::span<const double> lengths) const {
    double v = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) v += term(i, lengths[i]);
    return v;
  }

  double cap(std::size_t i) const { return caps_[i]; }

 private:
  int r_;
  std::vector<double> caps_;
  bool unbounded_;
  std::vector<double> mass_;
};

// Change in RWRE from raising l_i by `gain` while lowering l_j to keep the
// budget; the move is shortened to stay in bounds. Returns false when no
// feasible move remains.
struct Transfer {
  double gain_i;
  double loss_j;
  double change;
};

bool pair_transfer(const Objective& obj, std::span<const double> l,
                   const ClassDistribution& dist, std::size_t i, std::size_t j,
                   double gain, Transfer& out) {
  const double room_i = obj.cap(i) - l[i];
  const double avail_j = l[j] * dist[j] / dist[i];
  const double g = std::min({gain, room_i, avail_j});
  if (!(g > 0.0)) return false;
  const double loss = std::min(g * dist[i] / dist[j], l[j]);
  const double new_i = std::min(l[i] + g, obj.cap(i));
  const double new_j = std::max(l[j] - loss, 0.0);
  out = {new_i - l[i], l[j] - new_j,
         obj.term(i, new_i) - obj.term(i, l[i]) + obj.term(j, new_j) -
             obj.term(j, l[j])};
  return true;
}

}  // namespace

OracleReport brute_force_integer(const ClassDistribution& dist,
                                 const ImportanceWeights& weights,
                                 const StorageConfig& config,
                                 std::span<const std::int64_t> candidate) {
  if (config.unbounded()) {
    throw Error(ErrorCode::SearchSpaceTooLarge, "lengths are unbounded");
  }
  const std::size_t n = dist.size();
  const auto caps = config.expanded_lengths(n);
  double space = 1.0;
  for (double c : caps) space *= c + 1.0;
  if (space > kMaxBruteForceSpace) {
    std::ostringstream msg;
    msg << space << " integer vectors exceed the limit of " << kMaxBruteForceSpace;
    throw Error(ErrorCode::SearchSpaceTooLarge, msg.str());
  }

  const Objective obj(dist, weights, config);
  std::vector<std::vector<double>> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int l = 0; l <= static_cast<int>(caps[i]); ++l) {
      table[i].push_back(obj.term(i, l));
    }
  }

  const double limit = config.budget() + 1e-12 * std::max(1.0, config.budget());
  std::vector<int> current(n, 0), best(n, 0);
  double best_value = std::numeric_limits<double>::infinity();
  std::int64_t visited = 0;

  // Depth-first enumeration with budget pruning.
  auto visit = [&](auto&& self, std::size_t i, double used, double value) -> void {
    if (i == n) {
      ++visited;
      if (value < best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    for (int l = 0; l <= static_cast<int>(caps[i]); ++l) {
      const double u = used + dist[i] * l;
      if (u > limit) break;
      current[i] = l;
      self(self, i + 1, u, value + table[i][l]);
    }
    current[i] = 0;
  };
  visit(visit, 0, 0.0, 0.0);

  OracleReport out;
  out.optimum_value = best_value;
  out.optimum_plan.assign(best.begin(), best.end());
  out.trials = visited;
  if (!candidate.empty()) {
    std::vector<double> c(candidate.begin(), candidate.end());
    out.gap_vs_candidate = rwre(dist, weights, config, c).rwre - best_value;
  }
  return out;
}

bool perturbation_check(std::span<const double> lengths,
                        const ClassDistribution& dist,
                        const ImportanceWeights& weights,
                        const StorageConfig& config, int trials, double step,
                        std::uint64_t seed) {
  constexpr double kImprovement = 1e-9;
  rwre(dist, weights, config, lengths);  // feasibility
  const std::size_t n = dist.size();
  if (n < 2) return true;
  const Objective obj(dist, weights, config);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  Transfer t{};
  for (int k = 0; k < trials; ++k) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    if (pair_transfer(obj, lengths, dist, i, j, step, t) && t.change < -kImprovement) {
      return false;
    }
    if (pair_transfer(obj, lengths, dist, j, i, step, t) && t.change < -kImprovement) {
      return false;
    }
  }
  return true;
}

KktReport kkt_certify(std::span<const double> lengths,
                      const ClassDistribution& dist,
                      const ImportanceWeights& weights,
                      const StorageConfig& config) {
  constexpr double kBound = 1e-9;
  constexpr double kTol = 1e-8;
  rwre(dist, weights, config, lengths);  // feasibility
  const std::size_t n = dist.size();
  const double lr = std::log(static_cast<double>(config.radix()));
  const auto caps = config.expanded_lengths(n);
  const auto logw = weights.log_values();

  // Marginal benefit per unit budget: W_i ln r r^{-l_i} / (1 - r^{-L_i}).
  std::vector<double> benefit(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::isfinite(caps[i]) ? std::log(-std::expm1(-caps[i] * lr)) : 0.0;
    benefit[i] = caps[i] > 0.0 ? std::exp(logw[i] + std::log(lr) - lengths[i] * lr - lo)
                               : 0.0;
  }

  KktReport out;
  out.mu.assign(n, 0.0);
  out.nu.assign(n, 0.0);
  std::vector<std::size_t> saturated, empty;
  for (std::size_t i = 0; i < n; ++i) {
    if (caps[i] <= 0.0 || lengths[i] <= kBound) {
      empty.push_back(i);
    } else if (lengths[i] >= caps[i] - kBound) {
      saturated.push_back(i);
    } else {
      out.interior.push_back(i);
    }
  }
  if (out.interior.empty()) {
    throw Error(ErrorCode::NoInteriorClass,
                "every class sits on a bound; use perturbation_check");
  }

  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (std::size_t i : out.interior) {
    lo = std::min(lo, benefit[i]);
    hi = std::max(hi, benefit[i]);
    sum += benefit[i];
  }
  out.multiplier = sum / static_cast<double>(out.interior.size());
  out.stationarity_spread = (hi - lo) / out.multiplier;

  // Multipliers scaled by p_i as in the gradient of sum p_i W_i D_f.
  for (std::size_t i : saturated) {
    out.mu[i] = dist[i] * (benefit[i] - out.multiplier);
    out.worst_dual_violation =
        std::max(out.worst_dual_violation, -out.mu[i] / (dist[i] * out.multiplier));
    out.worst_slackness = std::max(
        out.worst_slackness, std::abs(out.mu[i] * (lengths[i] - caps[i])));
  }
  for (std::size_t i : empty) {
    out.nu[i] = dist[i] * (out.multiplier - benefit[i]);
    out.worst_dual_violation =
        std::max(out.worst_dual_violation, -out.nu[i] / (dist[i] * out.multiplier));
    out.worst_slackness =
        std::max(out.worst_slackness, std::abs(out.nu[i] * lengths[i]));
  }

  double used = 0.0;
  for (std::size_t i = 0; i < n; ++i) used += dist[i] * lengths[i];
  const bool budget_active = std::abs(used - config.budget()) <=
                             kTol * std::max(1.0, config.budget());

  out.passed = budget_active && out.stationarity_spread <= kTol &&
               out.worst_dual_violation <= kTol && out.worst_slackness <= kTol;
  return out;
}

double simulate_digit_truncation(std::uint32_t L, std::uint32_t l, int r,
                                 std::int64_t trials, std::uint64_t seed) {
  if (l > L) throw Error(ErrorCode::OutOfRange, "kept digits exceed length");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (r < 2) throw Error(ErrorCode::RadixTooSmall, "radix must be >= 2");
  const auto radix = static_cast<std::uint64_t>(r);
  std::uint64_t full = 1, dropped = 1;
  for (std::uint32_t k = 0; k < L; ++k) {
    if (full > std::numeric_limits<std::uint64_t>::max() / radix) {
      throw Error(ErrorCode::OutOfRange, "r^L does not fit in 64 bits");
    }
    full *= radix;
    if (k < L - l) dropped *= radix;
  }
  if (L == 0) return 0.0;

  const double bound = digit_distortion(L, l, r);
  const auto scale = static_cast<double>(full - 1);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> digit(0, r - 1);
  double worst = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    // Only the discarded low digits differ between a and its reconstruction.
    std::uint64_t low = 0, fill = 0;
    for (std::uint32_t k = 0; k < L - l; ++k) {
      low = low * static_cast<unsigned>(r) + static_cast<unsigned>(digit(rng));
      fill = fill * static_cast<unsigned>(r) + static_cast<unsigned>(digit(rng));
    }
    // The kept digits are drawn too, so that the stream matches a full draw.
    for (std::uint32_t k = 0; k < l; ++k) digit(rng);
    const std::uint64_t err = low > fill ? low - fill : fill - low;
    const double rel = static_cast<double>(err) / scale;
    if (err > dropped - 1 || rel > bound * (1 + 1e-15)) {
      throw Error(ErrorCode::OutOfRange, "observed error exceeds the bound");
    }
    worst = std::max(worst, rel);
  }
  return worst;
}

OracleReport grid_refine(const ClassDistribution& dist,
                         const ImportanceWeights& weights,
                         const StorageConfig& config,
                         std::span<const double> initial_lengths, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be > 0");
  const double initial = rwre(dist, weights, config, initial_lengths).rwre;
  const Objective obj(dist, weights, config);
  const std::size_t n = dist.size();
  std::vector<double> l(initial_lengths.begin(), initial_lengths.end());

  double resolution = step;
  while (resolution < 1.0) resolution *= 2.0;

  OracleReport out;
  Transfer t{};
  for (; resolution >= step * (1.0 - 1e-12); resolution *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          while (pair_transfer(obj, l, dist, i, j, resolution, t) &&
                 t.change < -1e-16 * obj.value(l)) {
            l[i] += t.gain_i;
            l[j] -= t.loss_j;
            l[i] = std::min(l[i], obj.cap(i));
            l[j] = std::max(l[j], 0.0);
            ++out.trials;
            improved = true;
          }
        }
      }
    }
  }
  out.optimum_plan = l;
  out.optimum_value = rwre(dist, weights, config, l).rwre;
  out.gap_vs_candidate = initial - out.optimum_value;
  return out;
}

}  // namespace impalloc
