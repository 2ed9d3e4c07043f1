#include <doctest.h>

#include <cmath>
#include <string>

#include "support.hpp"

using namespace testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("uniform distribution ties resolve to the lowest index") {
  const auto d = dist(kUniform5);
  CHECK(d.size() == 5);
  CHECK(d.argmin() == 0);
  CHECK(d.argmax() == 0);
}

TEST_CASE("broken-line distribution has strict extremes") {
  const auto d = dist(kFig1);
  CHECK(d.argmin() == 0);
  CHECK(d.argmax() == 5);
  CHECK(d.min_prob() == 0.03);
  CHECK(d.max_prob() == 0.29);
}

TEST_CASE("validated distribution round-trips its input") {
  const auto d = dist(kFig3);
  for (std::size_t i = 0; i < kFig3.size(); ++i) CHECK(d[i] == kFig3[i]);
}

TEST_CASE("distribution errors") {
  CHECK(code_of([] { dist({0.5, 0.6}); }) == ErrorCode::NotNormalized);
  CHECK(code_of([] { dist({}); }) == ErrorCode::Empty);
  CHECK(code_of([] { dist({0.0, 1.0}); }) == ErrorCode::NonPositiveProbability);
  CHECK(code_of([] { dist({-0.5, 1.5}); }) == ErrorCode::NonPositiveProbability);
  CHECK(code_of([] { dist({NAN, 1.0}); }) == ErrorCode::NonPositiveProbability);
  CHECK(code_of([] { dist({0.003, 0.007, 0.108, 0.132, 0.752}); }) ==
        ErrorCode::NotNormalized);
}

TEST_CASE("sums within tolerance are renormalized") {
  const auto d = dist({0.5 + 4e-10, 0.5});
  CHECK(d[0] + d[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d[0] > d[1]);
}

TEST_CASE("normalize_distribution divides by the sum") {
  const auto d = normalize_distribution({0.003, 0.007, 0.108, 0.132, 0.752});
  double s = 0.0;
  for (double p : d.probs()) s += p;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d[4] == doctest::Approx(0.752 / 1.002).epsilon(1e-15));
  CHECK(code_of([] { normalize_distribution({1.0, 0.0}); }) ==
        ErrorCode::NonPositiveProbability);
}

TEST_CASE("make_config accepts matching kinds") {
  const auto c = ideal(16, 4.0);
  CHECK(c.radix() == 2);
  CHECK(c.budget() == 4.0);
  CHECK(c.kind() == SystemKind::Ideal);
  CHECK(c.length_of(3) == 16.0);
  const auto q = unbounded(8.0);
  CHECK(q.unbounded());
  CHECK(std::isinf(q.length_of(0)));
  CHECK(std::isinf(q.capacity(dist(kUniform5))));
}

TEST_CASE("make_config errors") {
  CHECK(code_of([] { make_config(1, UniformLength{10}, 4.0, SystemKind::Ideal); }) ==
        ErrorCode::RadixTooSmall);
  CHECK(code_of([] { make_config(2, UniformLength{10}, -1.0, SystemKind::Ideal); }) ==
        ErrorCode::NegativeBudget);
  CHECK(code_of([] { make_config(2, UniformLength{10}, NAN, SystemKind::Ideal); }) ==
        ErrorCode::NegativeBudget);
  CHECK(code_of([] { make_config(2, UnboundedLength{}, 4.0, SystemKind::Ideal); }) ==
        ErrorCode::KindLengthMismatch);
  CHECK(code_of([] {
          make_config(2, UniformLength{10}, 4.0, SystemKind::Quantification);
        }) == ErrorCode::KindLengthMismatch);
  CHECK(code_of([] { make_config(2, UniformLength{10}, 4.0, SystemKind::General); }) ==
        ErrorCode::KindLengthMismatch);
  CHECK(code_of([] { general({}, 1.0); }) == ErrorCode::Empty);
}

TEST_CASE("capacity and compatibility") {
  const auto d = dist({0.25, 0.75});
  const auto g = general({4, 8}, 7.0);
  CHECK(g.capacity(d) == doctest::Approx(7.0));
  CHECK_NOTHROW(check_compatible(d, g));
  CHECK(code_of([&] { check_compatible(d, g.with_budget(7.01)); }) ==
        ErrorCode::BudgetExceedsCapacity);
  CHECK(code_of([&] { check_compatible(dist(kUniform5), g); }) ==
        ErrorCode::LengthCountMismatch);
  CHECK(code_of([&] { g.expanded_lengths(3); }) == ErrorCode::LengthCountMismatch);
  CHECK(g.with_budget(2.0).budget() == 2.0);
  CHECK(code_of([&] { g.with_budget(-2.0); }) == ErrorCode::NegativeBudget);
}

TEST_CASE("error messages carry the case name") {
  try {
    dist({0.5, 0.6});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("NotNormalized: ", 0) == 0);
  }
  CHECK(to_string(ErrorCode::SearchSpaceTooLarge) == "SearchSpaceTooLarge");
}
