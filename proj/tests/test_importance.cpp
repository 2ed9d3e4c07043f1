#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"

using namespace testing;

namespace {

double sum(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0);
}

}  // namespace

TEST_CASE("gamma_p examples") {
  CHECK(gamma_p(dist(kUniform5)) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(gamma_p(dist({1.0})) == 1.0);
  CHECK(gamma_p(dist(kTable1P1)) == doctest::Approx(0.8130).epsilon(1e-12));
  CHECK(gamma_p(dist(kFig3)) == doctest::Approx(0.401782).epsilon(1e-12));
}

TEST_CASE("mim weights examples") {
  const auto flat = mim_weights(dist(kFig1), 0.0);
  for (double w : flat.values()) CHECK(w == doctest::Approx(1.0 / 6).epsilon(1e-15));

  const auto w = mim_weights(dist({0.2, 0.8}), 5.0);
  const double e4 = std::exp(4.0), e1 = std::exp(1.0);
  CHECK(w[0] == doctest::Approx(e4 / (e4 + e1)).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(e1 / (e4 + e1)).epsilon(1e-14));
  CHECK(w[0] == doctest::Approx(0.9526).epsilon(1e-4));
  CHECK(sum(w.values()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.log_values()[1] == doctest::Approx(std::log(w[1])).epsilon(1e-14));
}

TEST_CASE("nmim weights examples") {
  const auto flat = nmim_weights(dist(kUniform5));
  for (double w : flat.values()) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));

  const auto w = nmim_weights(dist({0.2, 0.8}));
  const double a = std::exp(4.0), b = std::exp(0.25);
  CHECK(w[0] == doctest::Approx(a / (a + b)).epsilon(1e-14));
  CHECK(w[0] == doctest::Approx(0.9770).epsilon(1e-4));
  CHECK(w[1] == doctest::Approx(0.0230).epsilon(1e-2));
}

TEST_CASE("nmim weights decrease with probability") {
  const auto d = dist(kFig1);
  const auto w = nmim_weights(d);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(w[i - 1] > w[i]);
}

TEST_CASE("functional examples") {
  CHECK(mim_functional(dist(kUniform5), 5.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(mim_functional(dist(kTable1P1), 5.0) == doctest::Approx(2.6584).epsilon(2e-5));
  CHECK(mim_functional(dist(kTable1P1), 5.0) + 5.0 * gamma_p(dist(kTable1P1)) ==
        doctest::Approx(6.7234).epsilon(2e-5));
  CHECK(mim_functional(dist(kFig3), 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(nmim_functional(dist(kUniform5)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(nmim_functional(dist(kTable1P1)) == doctest::Approx(94.3948).epsilon(1e-6));
  CHECK(nmim_functional(dist({0.014, 0.086, 0.113, 0.375, 0.412})) ==
        doctest::Approx(66.1599).epsilon(1e-6));
  const auto f = functionals(dist(kUniform5), 5.0);
  CHECK(f.renyi2 == doctest::Approx(std::log(5.0)));
}

TEST_CASE("raw-vector functionals skip normalization") {
  const std::vector<double> p{0.003, 0.007, 0.108, 0.132, 0.752};
  CHECK(gamma_p(p) == doctest::Approx(0.59465).epsilon(1e-12));
  CHECK(mim_functional(p, 5.0) + 5.0 * gamma_p(p) ==
        doctest::Approx(6.1305).epsilon(2e-5));
}

TEST_CASE("explicit weights") {
  const auto w = ImportanceWeights::explicit_values({0.0, 2.0});
  CHECK(std::isinf(w.log_values()[0]));
  CHECK(w[1] == 2.0);
  CHECK_THROWS_AS(ImportanceWeights::explicit_values({}), Error);
  CHECK_THROWS_AS(ImportanceWeights::explicit_values({0.0, 0.0}), Error);
  CHECK_THROWS_AS(ImportanceWeights::explicit_values({-1.0, 2.0}), Error);
  CHECK_THROWS_AS(mim_weights(dist(kUniform5), INFINITY), Error);
}

TEST_CASE("log_sum_exp is shift invariant and overflow free") {
  const std::vector<double> xs{1000.0, 1000.0};
  CHECK(log_sum_exp(xs) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
}

TEST_CASE("gamma bounds on random distributions") {
  std::mt19937_64 rng(11);
  int violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto n = static_cast<std::size_t>(random_int(rng, 1, 12));
    const auto d = random_dist(rng, n, 0.0);
    const double g = gamma_p(d);
    violations += g < 1.0 / n - 1e-12 || g > 1.0 + 1e-12;
    for (double p : d.probs()) violations += g - p < -0.25 - 1e-12 || g - p > 1.0;
  }
  CHECK(violations == 0);
}

TEST_CASE("functional lower bounds on random distributions") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(random_int(rng, 1, 10));
    const auto d = random_dist(rng, n, 1e-3);
    CHECK(nmim_functional(d) >= n - 1.0 - 1e-9);
    CHECK(mim_functional(d, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    const auto f = functionals(d, 3.0);
    CHECK(f.gamma_p == gamma_p(d));
  }
}

TEST_CASE("mim weight of the rarest class grows with varpi") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 200; ++t) {
    const auto d = random_dist(rng, static_cast<std::size_t>(random_int(rng, 2, 8)));
    double prev_min = -1.0, prev_max = 2.0;
    for (double v = -50.0; v <= 50.0; v += 2.5) {
      const auto w = mim_weights(d, v);
      CHECK(w[d.argmin()] >= prev_min - 1e-15);
      CHECK(w[d.argmax()] <= prev_max + 1e-15);
      prev_min = w[d.argmin()];
      prev_max = w[d.argmax()];
    }
  }
}

TEST_CASE("mim weight limits at large coefficients") {
  const auto d = dist(kFig1);
  CHECK(mim_weights(d, 200.0)[d.argmin()] > 1.0 - 1e-3);
  CHECK(mim_weights(d, -200.0)[d.argmax()] > 1.0 - 1e-3);
  const auto big = mim_weights(d, 1000.0);
  CHECK(std::isfinite(sum(big.values())));
  CHECK(big[d.argmin()] > 1.0 - 1e-12);
  CHECK(sum(big.values()) == doctest::Approx(1.0));
}

TEST_CASE("tied extremes share the limit mass") {
  const auto d = dist({0.1, 0.1, 0.8});
  const auto w = mim_weights(d, 200.0);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("nmim functional is dominated by the rarest class") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 500; ++t) {
    const double pmin = random_real(rng, 0.002, 0.02);
    const auto n = static_cast<std::size_t>(random_int(rng, 2, 8));
    const auto rest = random_dist(rng, n - 1, 0.05);
    std::vector<double> p{pmin};
    for (double q : rest.probs()) p.push_back(q * (1.0 - pmin));
    const auto d = normalize_distribution(p);
    REQUIRE(d.argmin() == 0);
    const double q = d[0];
    CHECK(std::abs(nmim_functional(d) - (std::log(q) + (1.0 - q) / q)) <= 1e-3);
  }
}

TEST_CASE("equal rarest probability gives equal nmim") {
  const auto a = nmim_functional(dist({0.007, 0.24, 0.24, 0.24, 0.273}));
  const auto b = nmim_functional(dist({0.007, 0.009, 0.106, 0.129, 0.749}));
  CHECK(std::abs(a - b) <= 1e-3);
}

TEST_CASE("weights stay finite at extreme exponents") {
  const auto d = normalize_distribution({1e-6, 1.0 - 1e-6});
  const auto w = nmim_weights(d);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(std::isfinite(w.log_values()[1]));
  CHECK(w.log_values()[1] < -9e5);
  CHECK(std::isfinite(nmim_functional(d)));
  CHECK(mim_weights(d, -1000.0)[1] == doctest::Approx(1.0));
}
