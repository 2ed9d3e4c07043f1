#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace testing;

TEST_CASE("digit distortion examples") {
  CHECK(digit_distortion(10, 10, 2) == 0.0);
  CHECK(digit_distortion(10, 0, 2) == 1.0);
  CHECK(digit_distortion(4, 2, 2) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(digit_distortion(16, 4, 2) == 4095.0 / 65535.0);
  CHECK(digit_distortion(0, 0, 2) == 0.0);
  CHECK(digit_distortion(3, 1, 10) == 99.0 / 999.0);
}

TEST_CASE("digit distortion at real lengths matches direct evaluation") {
  for (std::uint32_t L : {4u, 10u, 16u}) {
    for (double l = 0.05; l < L; l += 0.37) {
      const double direct = (std::pow(2.0, L - l) - 1) / (std::pow(2.0, L) - 1);
      CHECK(digit_distortion(L, l, 2) == doctest::Approx(direct).epsilon(1e-13));
    }
  }
  const double d = digit_distortion(200, 100.5, 2);
  CHECK(d == doctest::Approx(std::pow(2.0, -100.5)).epsilon(1e-12));
  CHECK(digit_distortion(64, 1, 2) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("digit distortion range errors") {
  CHECK_THROWS_AS(digit_distortion(10, -0.1, 2), Error);
  CHECK_THROWS_AS(digit_distortion(10, 10.1, 2), Error);
  CHECK_THROWS_AS(digit_distortion(10, NAN, 2), Error);
  CHECK_THROWS_AS(digit_distortion(10, 5, 1), Error);
  CHECK_NOTHROW(digit_distortion(10, 10 + 1e-12, 2));
}

TEST_CASE("digit distortion is strictly decreasing and convex") {
  for (int r : {2, 3, 10}) {
    for (std::uint32_t L : {1u, 5u, 16u, 40u}) {
      const double h = L / 64.0;
      double prev = 2.0;
      for (double l = 0.0; l <= L + 1e-12; l += h) {
        const double x = std::min(l, double(L));
        const double d = digit_distortion(L, x, r);
        CHECK(d < prev);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        prev = d;
        if (x >= h && x + h <= L) {
          const double second = digit_distortion(L, x - h, r) - 2 * d +
                                digit_distortion(L, x + h, r);
          CHECK(second > -1e-15);
        }
      }
    }
  }
}

TEST_CASE("unbounded distortion") {
  CHECK(unbounded_distortion(0, 2) == 1.0);
  CHECK(unbounded_distortion(3, 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK_THROWS_AS(unbounded_distortion(-1, 2), Error);
}

TEST_CASE("rwre extremes") {
  const auto d = dist(kFig3);
  const auto w = mim_weights(d, 10.0);
  const auto zero = rwre(d, w, ideal(16, 0.0), std::vector<double>(5, 0.0));
  CHECK(zero.rwre == doctest::Approx(1.0).epsilon(1e-15));
  const auto full = rwre(d, w, ideal(16, 16.0), std::vector<double>(5, 16.0));
  CHECK(full.rwre == 0.0);
  CHECK(full.weighted_error == 0.0);
}

TEST_CASE("zero coefficient plan gives the uniform truncation error") {
  const auto d = dist(kFig3);
  const auto w = mim_weights(d, 0.0);
  const auto c = ideal(16, 4.0);
  const auto plan = solve_ideal(d, w, c);
  const auto e = rwre(d, w, c, plan);
  CHECK(std::abs(e.rwre - 4095.0 / 65535.0) <= 1e-12);
  CHECK(e.rwre == doctest::Approx(0.062485).epsilon(1e-5));
  for (double x : e.per_class_distortion) CHECK(x == doctest::Approx(e.rwre));
}

TEST_CASE("rwre rejects infeasible plans") {
  const auto d = dist({0.5, 0.5});
  const auto w = mim_weights(d, 1.0);
  const auto c = ideal(4, 2.0);
  CHECK_THROWS_AS(rwre(d, w, c, std::vector<double>{5.0, 0.0}), Error);
  CHECK_THROWS_AS(rwre(d, w, c, std::vector<double>{-0.5, 1.0}), Error);
  CHECK_THROWS_AS(rwre(d, w, c, std::vector<double>{3.0, 3.0}), Error);
  CHECK_THROWS_AS(rwre(d, w, c, std::vector<double>{1.0}), Error);
  CHECK_NOTHROW(rwre(d, w, c, std::vector<double>{2.0, 2.0 + 1e-12}));
  AllocationPlan unrounded;
  unrounded.continuous_lengths = {2.0, 2.0};
  CHECK_THROWS_AS(rwre_rounded(d, w, c, unrounded), Error);
}

TEST_CASE("interior closed form") {
  const auto d = dist(kFig3);
  CHECK(std::abs(rwre_interior_closed_form(d, 0.0, 16, 4.0, 2) - 4095.0 / 65535.0) <=
        1e-12);
  for (double v : {-30.0, -5.0, 7.0, 30.0}) {
    CHECK(rwre_interior_closed_form(dist(kUniform5), v, 16, 4.0, 2) ==
          doctest::Approx(4095.0 / 65535.0).epsilon(1e-12));
  }
  const auto w = mim_weights(d, 10.0);
  const auto c = ideal(16, 4.0);
  std::vector<double> l;
  const double g = gamma_p(d);
  for (double p : d.probs()) l.push_back(4.0 + 10.0 * (g - p) / std::log(2.0));
  const double direct = rwre(d, w, c, l).rwre;
  CHECK(rwre_interior_closed_form(d, 10.0, 16, 4.0, 2) ==
        doctest::Approx(direct).epsilon(1e-9));
  CHECK_THROWS_AS(rwre_interior_closed_form(dist(kFig1), 35.0, 10, 4.0, 2), Error);
}

TEST_CASE("nmim closed form") {
  const auto u = dist(kUniform5);
  CHECK(std::abs(rwre_nmim_closed_form(u, 8.0, 2) - std::pow(2.0, -8)) <= 1e-12);
  const auto w = nmim_weights(u);
  const auto c = unbounded(8.0);
  const double pipeline = rwre(u, w, c, solve_quantification(u, w, c)).rwre;
  CHECK(pipeline == doctest::Approx(std::pow(2.0, -8)).epsilon(1e-9));
  CHECK(rwre_nmim_closed_form(u, 2000.0, 2) < 1e-300);
  CHECK_THROWS_AS(rwre_nmim_closed_form(u, 7.0, 2), Error);
}

TEST_CASE("nmim closed form bounds over random inputs") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 2000; ++t) {
    const auto n = static_cast<std::size_t>(random_int(rng, 1, 8));
    const auto d = random_dist(rng, n);
    const int r = random_int(rng, 2, 16);
    const double floor = n / std::log(double(r));
    const double T = floor + random_real(rng, 0.0, 20.0);
    const double e = rwre_nmim_closed_form(d, T, r);
    CHECK(e <= std::exp(-double(n)) * (1 + 1e-12));
    if (r == 2) CHECK(e <= std::pow(2.0, -double(n)));
  }
}

TEST_CASE("finite lengths approach the quantification error") {
  const auto d = dist(kFig3);
  const auto w = mim_weights(d, 5.0);
  const auto q = unbounded(6.0);
  const auto plan = solve_quantification(d, w, q);
  const double limit = rwre(d, w, q, plan).rwre;
  double prev = INFINITY;
  for (std::uint32_t L : {32u, 48u, 64u}) {
    const double finite = rwre(d, w, ideal(L, 6.0), plan.continuous_lengths).rwre;
    const double gap = std::abs(finite - limit);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("extreme nmim weights keep the error finite") {
  const auto d = dist({0.007, 0.24, 0.24, 0.24, 0.273});
  const auto w = nmim_weights(d);
  for (double T : {0.0, 3.0, 10.0, 40.0}) {
    const auto c = unbounded(T);
    const double e = rwre(d, w, c, solve_quantification(d, w, c)).rwre;
    CHECK(std::isfinite(e));
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
  }
}
