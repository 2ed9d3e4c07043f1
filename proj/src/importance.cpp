#include "impalloc/importance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace impalloc {

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

namespace {

// Normalizes log-weights so that log_sum_exp(out) == 0.
std::vector<double> normalize_logs(std::vector<double> exponents) {
  const double total = log_sum_exp(exponents);
  for (double& e : exponents) e -= total;
  return exponents;
}

}  // namespace

ImportanceWeights::ImportanceWeights(std::vector<double> log_values,
                                     WeightRule rule)
    : log_values_(std::move(log_values)), rule_(rule) {
  values_.reserve(log_values_.size());
  for (double lw : log_values_) values_.push_back(std::exp(lw));
}

ImportanceWeights ImportanceWeights::explicit_values(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::Empty, "no weights given");
  bool any_positive = false;
  for (double w : values) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidWeights,
                  "weights must be finite and nonnegative");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) {
    throw Error(ErrorCode::InvalidWeights, "at least one weight must be > 0");
  }
  ImportanceWeights out;
  out.rule_ = ExplicitRule{};
  out.log_values_.reserve(values.size());
  for (double w : values) out.log_values_.push_back(std::log(w));
  out.values_ = std::move(values);
  return out;
}

double gamma_p(std::span<const double> probs) {
  double g = 0.0;
  for (double p : probs) g += p * p;
  return g;
}

double gamma_p(const ClassDistribution& dist) { return gamma_p(dist.probs()); }

ImportanceWeights mim_weights(const ClassDistribution& dist, double varpi) {
  if (!std::isfinite(varpi)) {
    throw Error(ErrorCode::InvalidArgument, "importance coefficient must be finite");
  }
  std::vector<double> exps;
  exps.reserve(dist.size());
  for (double p : dist.probs()) exps.push_back(varpi * (1.0 - p));
  return ImportanceWeights(normalize_logs(std::move(exps)), MimRule{varpi});
}

ImportanceWeights nmim_weights(const ClassDistribution& dist) {
  std::vector<double> exps;
  exps.reserve(dist.size());
  for (double p : dist.probs()) exps.push_back((1.0 - p) / p);
  return ImportanceWeights(normalize_logs(std::move(exps)), NmimRule{});
}

double mim_functional(std::span<const double> probs, double varpi) {
  std::vector<double> terms;
  terms.reserve(probs.size());
  for (double p : probs) terms.push_back(std::log(p) + varpi * (1.0 - p));
  return log_sum_exp(terms);
}

double nmim_functional(std::span<const double> probs) {
  std::vector<double> terms;
  terms.reserve(probs.size());
  for (double p : probs) terms.push_back(std::log(p) + (1.0 - p) / p);
  return log_sum_exp(terms);
}

double mim_functional(const ClassDistribution& dist, double varpi) {
  return mim_functional(dist.probs(), varpi);
}

double nmim_functional(const ClassDistribution& dist) {
  return nmim_functional(dist.probs());
}

ImportanceFunctionals functionals(const ClassDistribution& dist, double varpi) {
  const double g = gamma_p(dist);
  return {g, mim_functional(dist, varpi), nmim_functional(dist), -std::log(g)};
}

}  // namespace impalloc
