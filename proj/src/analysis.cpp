#include "impalloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "impalloc/allocator.hpp"
#include "impalloc/distortion.hpp"
#include "impalloc/importance.hpp"

namespace impalloc {

namespace {

constexpr double kSlack = 1e-12;

double log_radix(int r) { return std::log(static_cast<double>(r)); }

// e-exponent of the interior RWRE numerator at compressed size delta:
// varpi (1 - gamma_p) + delta ln r - MIM(varpi, P).
double interior_exponent(double varpi, double gamma, double mim, double delta,
                         double lr) {
  return varpi * (1.0 - gamma) + delta * lr - mim;
}

}  // namespace

InteriorCheck interior_condition_check(const ClassDistribution& dist,
                                       double varpi, std::uint32_t L, double T,
                                       int r) {
  const double lr = log_radix(r);
  const double g = gamma_p(dist);
  InteriorCheck out;
  out.holds = true;
  for (double p : dist.probs()) {
    const double l = T + varpi * (g - p) / lr;
    const double margin = std::min(l, L - l);
    out.lengths.push_back(l);
    out.margins.push_back(margin);
    out.holds = out.holds && margin >= -kSlack;
  }
  return out;
}

Interval sufficient_varpi_range(double T, std::uint32_t L, int r) {
  const double lr = log_radix(r);
  return {std::max(4.0 * lr * (T - L), -T * lr),
          std::min(4.0 * T * lr, lr * (L - T))};
}

Interval sufficient_varpi_range_as_printed(double T, std::uint32_t L, int r) {
  const double lr = log_radix(r);
  return {std::max(4.0 * lr * (T - L), -T / lr),
          std::min(4.0 * T * lr, lr * (L - T))};
}

std::vector<double> closed_form_interior_lengths(const ClassDistribution& dist,
                                                 double varpi, double T, int r,
                                                 std::uint32_t L) {
  auto check = interior_condition_check(dist, varpi, L, T, r);
  if (!check.holds) {
    throw Error(ErrorCode::InteriorConditionViolated,
                "closed-form lengths leave [0, L]");
  }
  return std::move(check.lengths);
}

std::vector<double> closed_form_interior_lengths(const ClassDistribution& dist,
                                                 double varpi, double T, int r) {
  const double lr = log_radix(r);
  const double g = gamma_p(dist);
  std::vector<double> out;
  for (double p : dist.probs()) {
    const double l = T + varpi * (g - p) / lr;
    if (l < -kSlack) {
      throw Error(ErrorCode::InteriorConditionViolated,
                  "closed-form length is negative");
    }
    out.push_back(l);
  }
  return out;
}

RwreBounds rwre_bounds(const ClassDistribution& dist, double varpi,
                       std::uint32_t L, int r) {
  const double lr = log_radix(r);
  const double g = gamma_p(dist);
  const double mim = mim_functional(dist, varpi);
  // Interior for all classes <=> max_i s_i <= L - T <= L + min_i s_i with
  // s_i = varpi (gamma_p - p_i) / ln r. For varpi >= 0 the extremes sit at the
  // least and most probable classes.
  double smax = -INFINITY, smin = INFINITY;
  for (double p : dist.probs()) {
    const double s = varpi * (g - p) / lr;
    smax = std::max(smax, s);
    smin = std::min(smin, s);
  }
  const Interval range{std::max(smax, 0.0), std::min(L + smin, double(L))};
  const double denom = std::expm1(L * lr);
  RwreBounds out;
  out.compressed_range = range;
  out.delta1 = std::expm1(interior_exponent(varpi, g, mim, range.lower, lr)) / denom;
  out.delta2 = std::expm1(interior_exponent(varpi, g, mim, range.upper, lr)) / denom;
  return out;
}

double max_compressed_size_lower_bound(std::uint32_t L, int r, double delta) {
  const double lr = log_radix(r);
  return std::log1p(delta * std::expm1(L * lr)) / lr;
}

double max_compressed_size(const ClassDistribution& dist, double varpi,
                           std::uint32_t L, int r, double delta) {
  const auto bounds = rwre_bounds(dist, varpi, L, r);
  const double tol = 1e-12 * std::max(1.0, std::abs(delta));
  if (!(delta >= bounds.delta1 - tol && delta <= bounds.delta2 + tol)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "delta " << delta << " outside [" << bounds.delta1 << ", "
        << bounds.delta2 << "]";
    throw Error(ErrorCode::DeltaOutOfRange, msg.str());
  }
  const double lr = log_radix(r);
  return (std::log1p(delta * std::expm1(L * lr)) + mim_functional(dist, varpi) -
          varpi + varpi * gamma_p(dist)) /
         lr;
}

std::vector<double> nmim_interior_lengths(const ClassDistribution& dist,
                                          double T, int r) {
  const double lr = log_radix(r);
  const double n = static_cast<double>(dist.size());
  std::vector<double> out;
  for (double p : dist.probs()) {
    const double l = T + 1.0 / (p * lr) - n / lr;
    if (l < -kSlack) {
      std::ostringstream msg;
      msg << "class with p = " << p << " would get length " << l;
      throw Error(ErrorCode::InteriorConditionViolated, msg.str());
    }
    out.push_back(std::max(l, 0.0));
  }
  return out;
}

Interval nmim_interior_prob_interval(std::size_t n,
                                     std::optional<std::uint32_t> L, double T,
                                     int r) {
  const double lr = log_radix(r);
  const double nn = static_cast<double>(n);
  const double lower = L ? 1.0 / (nn + (*L - T) * lr) : 0.0;
  const double upper = nn > T * lr ? 1.0 / (nn - T * lr) : 1.0;
  return {lower, upper};
}

StorageTarget min_storage_for_target_nmim(const ClassDistribution& dist,
                                          double delta, int r) {
  const double lr = log_radix(r);
  const double n = static_cast<double>(dist.size());
  if (!(delta > 0.0) || delta > std::exp(-n * lr)) {
    std::ostringstream msg;
    msg << "target " << delta << " must lie in (0, r^-n]";
    throw Error(ErrorCode::TargetUnreachable, msg.str());
  }
  const double t = (n - 1.0 - nmim_functional(dist) - std::log(delta)) / lr;
  const double floor = n / lr;
  if (t < floor) return {floor, true};
  return {t, false};
}

MonotonicityReport evaluate_varpi_monotonicity(
    const ClassDistribution& dist, std::uint32_t L, double T, int r,
    std::span<const double> varpi_grid) {
  constexpr double kTol = 1e-9;
  const auto config = make_config(r, UniformLength{L}, T, SystemKind::Ideal);
  MonotonicityReport out;
  out.zero_coefficient_value = digit_distortion(L, T, r);
  for (double varpi : varpi_grid) {
    const auto weights = mim_weights(dist, varpi);
    const auto plan = solve_ideal(dist, weights, config);
    out.varpi.push_back(varpi);
    out.rwre.push_back(rwre(dist, weights, config, plan).rwre);
  }
  for (std::size_t k = 0; k < out.varpi.size(); ++k) {
    const double v = out.varpi[k], e = out.rwre[k];
    if (e > out.zero_coefficient_value + kTol) {
      out.violations.push_back({v, 0.0, e, out.zero_coefficient_value,
                                "exceeds the zero-coefficient value"});
    }
    if (v == 0.0 && std::abs(e - out.zero_coefficient_value) > kTol) {
      out.violations.push_back({v, 0.0, e, out.zero_coefficient_value,
                                "differs from the zero-coefficient value"});
    }
    if (k == 0) continue;
    const double pv = out.varpi[k - 1], pe = out.rwre[k - 1];
    if (pv >= 0.0 && e > pe + kTol) {
      out.violations.push_back({pv, v, pe, e, "increase for positive varpi"});
    }
    if (v <= 0.0 && e < pe - kTol) {
      out.violations.push_back({pv, v, pe, e, "decrease for negative varpi"});
    }
  }
  return out;
}

}  // namespace impalloc
