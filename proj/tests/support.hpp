#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "impalloc/allocator.hpp"
#include "impalloc/distortion.hpp"
#include "impalloc/importance.hpp"
#include "impalloc/model.hpp"

namespace testing {

using namespace impalloc;

inline const std::vector<double> kFig1{0.03, 0.07, 0.1395, 0.2205, 0.25, 0.29};
inline const std::vector<double> kFig3{0.031, 0.052, 0.127, 0.208, 0.582};
inline const std::vector<double> kTable1P1{0.01, 0.02, 0.03, 0.04, 0.9};
inline const std::vector<double> kUniform5{0.2, 0.2, 0.2, 0.2, 0.2};

inline ClassDistribution dist(std::vector<double> p) {
  return validate_distribution(std::move(p));
}

inline StorageConfig ideal(std::uint32_t L, double T, int r = 2) {
  return make_config(r, UniformLength{L}, T, SystemKind::Ideal);
}

inline StorageConfig unbounded(double T, int r = 2) {
  return make_config(r, UnboundedLength{}, T, SystemKind::Quantification);
}

inline StorageConfig general(std::vector<std::uint32_t> L, double T, int r = 2) {
  return make_config(r, PerClassLength{std::move(L)}, T, SystemKind::General);
}

/// Random distribution with n classes and no probability below floor.
inline ClassDistribution random_dist(std::mt19937_64& rng, std::size_t n,
                                     double floor = 1e-3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& x : w) sum += x = -std::log(1.0 - u(rng));
  for (double& x : w) x = floor + (1.0 - floor * n) * x / sum;
  return normalize_distribution(std::move(w));
}

inline double random_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int random_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double budget_used(const ClassDistribution& d, const std::vector<double>& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) s += d[i] * l[i];
  return s;
}

}  // namespace testing
