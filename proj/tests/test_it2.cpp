#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dstyle/errors.hpp"
#include "dstyle/it2.hpp"
#include "test_support.hpp"

using namespace dstyle;

TEST_CASE("trapezoid evaluation with scaled height") {
  TrapezoidParams p(1.0, 2.0, 4.0, 6.0, 0.8);
  CHECK(eval_trapezoid(p, 0.5) == doctest::Approx(0.0));
  CHECK(eval_trapezoid(p, 1.0) == doctest::Approx(0.0));
  CHECK(eval_trapezoid(p, 1.5) == doctest::Approx(0.4));  // half way up a 0.8 edge
  CHECK(eval_trapezoid(p, 2.0) == doctest::Approx(0.8));
  CHECK(eval_trapezoid(p, 3.0) == doctest::Approx(0.8));
  CHECK(eval_trapezoid(p, 4.0) == doctest::Approx(0.8));
  CHECK(eval_trapezoid(p, 5.0) == doctest::Approx(0.4));
  CHECK(eval_trapezoid(p, 6.0) == doctest::Approx(0.0));
  CHECK(eval_trapezoid(p, 7.0) == doctest::Approx(0.0));
}

TEST_CASE("trapezoid zero width edges step to the height") {
  TrapezoidParams left(0.0, 0.0, 2.0, 3.0, 1.0);
  CHECK(eval_trapezoid(left, 0.0) == doctest::Approx(1.0));
  TrapezoidParams right(1.0, 2.0, 5.0, 5.0, 0.9);
  CHECK(eval_trapezoid(right, 5.0) == doctest::Approx(0.9));
  TrapezoidParams spike(2.0, 2.0, 2.0, 2.0, 1.0);
  CHECK(eval_trapezoid(spike, 2.0) == doctest::Approx(1.0));
  CHECK(eval_trapezoid(spike, 2.1) == doctest::Approx(0.0));
}

TEST_CASE("trapezoid parameter validation") {
  CHECK_THROWS_AS(TrapezoidParams(2.0, 1.0, 3.0, 4.0, 1.0), ConfigError);
  CHECK_THROWS_AS(TrapezoidParams(1.0, 2.0, 5.0, 4.0, 1.0), ConfigError);
  CHECK_THROWS_AS(TrapezoidParams(1.0, 2.0, 3.0, 4.0, 0.0), ConfigError);
  CHECK_THROWS_AS(TrapezoidParams(1.0, 2.0, 3.0, 4.0, 1.5), ConfigError);
  CHECK_THROWS_AS(TrapezoidParams(1.0, 2.0, 3.0, std::nan(""), 1.0), ConfigError);
  try {
    TrapezoidParams(2.0, 1.0, 3.0, 4.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == "InvalidTrapezoid");
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("interval type-2 set containment validation") {
  TrapezoidParams upper(0.0, 2.0, 4.0, 6.0, 1.0);
  CHECK_NOTHROW(It2TrapezoidSet("ok", upper, TrapezoidParams(1.0, 2.5, 3.5, 5.0, 0.8)));
  // same support, same height: legal (degenerate footprint)
  CHECK_NOTHROW(It2TrapezoidSet("crisp", upper, upper));
  // lower support escaping the upper support
  CHECK_THROWS_AS(It2TrapezoidSet("bad", upper, TrapezoidParams(-1.0, 2.0, 3.0, 5.0, 0.5)),
                  ConfigError);
  // same support but lower rises faster than upper near the left edge
  CHECK_THROWS_AS(It2TrapezoidSet("bad", TrapezoidParams(0.0, 4.0, 4.0, 6.0, 1.0),
                                  TrapezoidParams(0.0, 1.0, 4.0, 6.0, 1.0)),
                  ConfigError);
  // lower taller than upper
  CHECK_THROWS_AS(It2TrapezoidSet("bad", TrapezoidParams(0.0, 2.0, 4.0, 6.0, 0.7),
                                  TrapezoidParams(1.0, 2.5, 3.5, 5.0, 0.8)),
                  ConfigError);
}

TEST_CASE("membership interval spot values from the standard partitions") {
  // velocity subset "Very Slow"
  It2TrapezoidSet vs("Very Slow", TrapezoidParams(0, 0, 15, 25, 1.0),
                     TrapezoidParams(0, 0, 12, 20, 0.8));
  MembershipInterval at0 = membership_interval(vs, 0.0);
  CHECK(at0.hi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at0.lo == doctest::Approx(0.8).epsilon(1e-12));
  MembershipInterval at20 = membership_interval(vs, 20.0);
  CHECK(std::abs(at20.hi - 0.5) < 1e-9);
  CHECK(std::abs(at20.lo - 0.0) < 1e-9);

  // acceleration subset "Small": both edges scale with the lower height 0.8
  It2TrapezoidSet small("Small", TrapezoidParams(0, 0, 2, 3.5, 1.0),
                        TrapezoidParams(0, 0, 1.5, 2.7, 0.8));
  MembershipInterval at235 = membership_interval(small, 2.35);
  CHECK(at235.hi == doctest::Approx((3.5 - 2.35) / 1.5).epsilon(1e-12));
  CHECK(at235.lo == doctest::Approx(0.8 * (2.7 - 2.35) / 1.2).epsilon(1e-12));

  CHECK_THROWS_AS(membership_interval(vs, std::nan("")), DataError);
}

TEST_CASE("linguistic variable validation") {
  auto make = [](double lo, double hi) {
    return LinguisticVariable(
        "v", "", lo, hi,
        {It2TrapezoidSet("L", TrapezoidParams(0, 0, 4, 6, 1.0), TrapezoidParams(0, 0, 3, 5, 0.8)),
         It2TrapezoidSet("H", TrapezoidParams(4, 6, 10, 10, 1.0),
                         TrapezoidParams(5, 7, 10, 10, 0.8))});
  };
  CHECK_NOTHROW(make(0.0, 10.0));
  CHECK_THROWS_AS(make(0.0, 8.0), ConfigError);   // H leaves the universe
  CHECK_THROWS_AS(make(10.0, 0.0), ConfigError);  // inverted universe

  // gap between the subsets: coverage check must fire
  CHECK_THROWS_AS(
      LinguisticVariable("v", "", 0.0, 10.0,
                         {It2TrapezoidSet("L", TrapezoidParams(0, 0, 2, 3, 1.0),
                                          TrapezoidParams(0, 0, 2, 3, 0.8)),
                          It2TrapezoidSet("H", TrapezoidParams(7, 8, 10, 10, 1.0),
                                          TrapezoidParams(7, 8, 10, 10, 0.8))}),
      ConfigError);

  LinguisticVariable v = make(0.0, 10.0);
  CHECK(v.clamp(-3.0) == 0.0);
  CHECK(v.clamp(12.0) == 10.0);
  CHECK(v.clamp(7.0) == 7.0);
  CHECK(v.subset_index("H") == 1);
  CHECK(v.subset_index("nope") == -1);
}

TEST_CASE("km centroid of a symmetric set is symmetric") {
  It2TrapezoidSet s("sym", TrapezoidParams(0, 2, 4, 6, 1.0), TrapezoidParams(1, 2.5, 3.5, 5, 0.7));
  Interval c = km_centroid(s, 2001);
  CHECK(c.lo < c.hi);
  CHECK(c.mid() == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("km centroid of a degenerate footprint collapses to a point") {
  TrapezoidParams t(0, 2, 4, 6, 1.0);
  It2TrapezoidSet s("crisp", t, t);
  Interval c = km_centroid(s, 1001);
  CHECK(c.width() < 1e-9);
  CHECK(c.mid() == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("km centroid error cases") {
  TrapezoidParams spike(2, 2, 2, 2, 1.0);
  CHECK_THROWS_AS(km_centroid(It2TrapezoidSet("spike", spike, spike)), NumericError);
  TrapezoidParams t(0, 2, 4, 6, 1.0);
  CHECK_THROWS_AS(km_centroid(It2TrapezoidSet("t", t, t), 1), ConfigError);
}

TEST_CASE("km centroid matches the brute force oracle") {
  testsup::Rng rng(0x5eed501ULL);
  for (int rep = 0; rep < 120; ++rep) {
    It2TrapezoidSet s = testsup::random_set(rng);
    int resolution = rng.range(4, 12);
    Interval got = km_centroid(s, resolution);
    Interval want = testsup::centroid_oracle(s, resolution);
    CHECK(got.lo == doctest::Approx(want.lo).epsilon(1e-6));
    CHECK(got.hi == doctest::Approx(want.hi).epsilon(1e-6));
    CHECK(got.lo <= got.hi + 1e-12);
  }
}

TEST_CASE("km weighted average matches the brute force oracle") {
  testsup::Rng rng(0x5eed502ULL);
  for (int rep = 0; rep < 200; ++rep) {
    int n = rng.range(1, 4);
    std::vector<Interval> xs;
    std::vector<MembershipInterval> ws;
    bool any = false;
    for (int i = 0; i < n; ++i) {
      double lo = rng.uniform(0.0, 1.0);
      double hi = lo + rng.uniform(0.0, 0.5);
      xs.push_back({lo, hi});
      double wlo = rng.uniform(0.0, 0.6);
      double whi = wlo + rng.uniform(0.0, 0.4);
      if (rng.uniform() < 0.2) wlo = 0.0;  // exercise zero lower firings
      ws.push_back({wlo, whi});
      any = any || whi > 0;
    }
    if (!any) ws[0].hi = 0.5;
    Interval got = km_weighted_average(xs, ws);
    Interval want = testsup::weighted_average_oracle(xs, ws);
    CHECK(got.lo == doctest::Approx(want.lo).epsilon(1e-6));
    CHECK(got.hi == doctest::Approx(want.hi).epsilon(1e-6));
  }
}

TEST_CASE("km weighted average error cases") {
  std::vector<Interval> xs{{0.1, 0.2}, {0.5, 0.6}};
  std::vector<MembershipInterval> one{{0.2, 0.4}};
  CHECK_THROWS_AS(km_weighted_average(xs, one), DataError);
  std::vector<MembershipInterval> dead{{0.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(km_weighted_average(xs, dead), NumericError);
  try {
    km_weighted_average(xs, dead);
  } catch (const Error& e) {
    CHECK(e.code() == "NoRuleFired");
    CHECK(e.exit_code() == 4);
  }
  CHECK_THROWS_AS(km_weighted_average(std::span<const Interval>{},
                                      std::span<const MembershipInterval>{}),
                  DataError);
}

TEST_CASE("interval helpers") {
  Interval i{1.0, 3.0};
  CHECK(i.mid() == doctest::Approx(2.0));
  CHECK(i.width() == doctest::Approx(2.0));
}
