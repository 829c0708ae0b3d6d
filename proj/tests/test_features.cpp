#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dstyle/errors.hpp"
#include "dstyle/features.hpp"
#include "test_support.hpp"

using namespace dstyle;

namespace {

KinematicSeries series_with(std::vector<double> speed, std::vector<double> accel,
                            std::vector<double> jerk) {
  KinematicSeries ks;
  std::size_t n = speed.size();
  for (std::size_t i = 0; i < n; ++i) ks.t.push_back(0.1 * static_cast<double>(i));
  ks.speed = std::move(speed);
  ks.accel_long = std::move(accel);
  ks.accel_lat.assign(n, 0.0);
  ks.jerk_lat = std::move(jerk);
  return ks;
}

}  // namespace

TEST_CASE("kinematics from positions: constant speed straight line") {
  std::vector<TrajectorySample> s;
  for (int i = 0; i < 51; ++i) s.push_back({0.1 * i, 1.0 * i, 0.0});  // 10 m/s along x
  KinematicSeries ks = kinematics_from_trajectory(std::span<const TrajectorySample>(s), 0.1);
  REQUIRE(ks.speed.size() == s.size());
  for (std::size_t i = 0; i < ks.speed.size(); ++i) {
    CHECK(ks.speed[i] == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(std::abs(ks.accel_long[i]) < 1e-9);
    CHECK(std::abs(ks.accel_lat[i]) < 1e-7);
    CHECK(std::abs(ks.jerk_lat[i]) < 1e-6);
  }
}

TEST_CASE("kinematics from positions: constant acceleration ramp") {
  std::vector<TrajectorySample> s;
  for (int i = 0; i < 51; ++i) {
    double t = 0.1 * i;
    s.push_back({t, 5.0 * t + 0.5 * t * t, 0.0});  // v = 5 + t
  }
  KinematicSeries ks = kinematics_from_trajectory(std::span<const TrajectorySample>(s), 0.1);
  for (std::size_t i = 0; i < ks.speed.size(); ++i) {
    double t = 0.1 * static_cast<double>(i);
    CHECK(ks.speed[i] == doctest::Approx(5.0 + t).epsilon(1e-9));
  }
  // speed is quadratic-free, so the first-derivative chain is exact interior
  for (std::size_t i = 1; i + 1 < ks.accel_long.size(); ++i)
    CHECK(ks.accel_long[i] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("kinematics from positions: circle has lateral acceleration v^2/r") {
  const double radius = 50.0, v = 10.0;
  std::vector<TrajectorySample> s;
  for (int i = 0; i < 51; ++i) {
    double t = 0.1 * i;
    s.push_back({t, radius * std::sin(v * t / radius), radius * (1.0 - std::cos(v * t / radius))});
  }
  KinematicSeries ks = kinematics_from_trajectory(std::span<const TrajectorySample>(s), 0.1);
  // expected a_lat = v^2 / r = 2.0; finite differences are close, not exact
  for (std::size_t i = 2; i + 2 < ks.accel_lat.size(); ++i)
    CHECK(ks.accel_lat[i] == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("kinematics from filter states uses speed times yaw rate") {
  std::vector<KinematicState> st;
  for (int i = 0; i < 10; ++i) st.push_back({0.1 * i, 0.0, 0.0, 0.0, 10.0, 0.2});
  KinematicSeries ks = kinematics_from_trajectory(std::span<const KinematicState>(st), 0.1);
  for (double a : ks.accel_lat) CHECK(a == doctest::Approx(2.0));
  for (double j : ks.jerk_lat) CHECK(std::abs(j) < 1e-9);
  for (double a : ks.accel_long) CHECK(std::abs(a) < 1e-9);
}

TEST_CASE("stationary trajectory yields zero lateral acceleration, not NaN") {
  std::vector<TrajectorySample> s;
  for (int i = 0; i < 10; ++i) s.push_back({0.1 * i, 3.0, 4.0});
  KinematicSeries ks = kinematics_from_trajectory(std::span<const TrajectorySample>(s), 0.1);
  for (double v : ks.speed) CHECK(v == doctest::Approx(0.0));
  for (double a : ks.accel_lat) CHECK(a == 0.0);
}

TEST_CASE("feature extraction separates acceleration and deceleration") {
  // 50 samples: accel +2 on odd indices, -1 on even, zero never
  std::vector<double> speed(50, 10.0), accel(50), jerk(50, 0.0);
  for (int i = 0; i < 50; ++i) accel[i] = i % 2 ? 2.0 : -1.0;
  KinematicSeries ks = series_with(speed, accel, jerk);
  FeatureVector f = extract_features(ks, 5.0, UnitMode::ms);
  CHECK(f.mean_velocity == doctest::Approx(10.0));
  CHECK(f.mean_accel == doctest::Approx(2.0));
  CHECK(f.mean_decel == doctest::Approx(1.0));
  CHECK(f.std_lateral_jerk == doctest::Approx(0.0));

  FeatureVector kmh = extract_features(ks, 5.0, UnitMode::kmh);
  CHECK(kmh.mean_velocity == doctest::Approx(36.0));
}

TEST_CASE("all-coasting window reports zero acceleration means") {
  std::vector<double> speed(50, 7.0), accel(50, 0.0), jerk(50, 0.0);
  KinematicSeries ks = series_with(speed, accel, jerk);
  FeatureVector f = extract_features(ks, 5.0, UnitMode::ms);
  CHECK(f.mean_accel == 0.0);
  CHECK(f.mean_decel == 0.0);
}

TEST_CASE("lateral jerk dispersion uses the population formula") {
  std::vector<double> speed(50, 5.0), accel(50, 0.0), jerk(50, 0.0);
  jerk[0] = 1.0;
  jerk[1] = 2.0;
  jerk[2] = 3.0;
  jerk[3] = 4.0;
  KinematicSeries ks = series_with(speed, accel, jerk);
  FeatureVector f = extract_features(ks, 5.0, UnitMode::ms);
  // population std of {1,2,3,4} + 46 zeros
  double mean = 10.0 / 50.0;
  double ss = 0.0;
  for (int i = 0; i < 50; ++i) {
    double v = i < 4 ? static_cast<double>(i + 1) : 0.0;
    ss += (v - mean) * (v - mean);
  }
  CHECK(f.std_lateral_jerk == doctest::Approx(std::sqrt(ss / 50.0)).epsilon(1e-12));
}

TEST_CASE("window extraction validates the span") {
  std::vector<double> speed(20, 5.0), accel(20, 0.0), jerk(20, 0.0);
  KinematicSeries ks = series_with(speed, accel, jerk);  // 2 s of data
  CHECK_THROWS_AS(extract_features(ks, 5.0, UnitMode::ms), DataError);
  try {
    extract_features(ks, 5.0, UnitMode::ms);
  } catch (const Error& e) {
    CHECK(e.code() == "WindowTooShort");
  }
  CHECK_THROWS_AS(extract_features(ks, -1.0, UnitMode::ms), ConfigError);
}

TEST_CASE("split_windows drops the trailing remainder") {
  std::vector<double> speed(123, 1.0), accel(123, 0.0), jerk(123, 0.0);
  KinematicSeries ks = series_with(speed, accel, jerk);  // 12.3 s at 10 Hz
  auto parts = split_windows(ks, 5.0);                   // windows of 50 samples
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].t.size() == 50);
  CHECK(parts[1].t.size() == 50);
  CHECK(parts[0].t.front() == doctest::Approx(0.0));
  CHECK(parts[1].t.front() == doctest::Approx(5.0));

  auto none = split_windows(ks, 20.0);
  CHECK(none.empty());
}

TEST_CASE("series length and finiteness validation") {
  KinematicSeries ragged;
  ragged.t = {0.0, 0.1};
  ragged.speed = {1.0};
  ragged.accel_long = {0.0, 0.0};
  ragged.accel_lat = {0.0, 0.0};
  ragged.jerk_lat = {0.0, 0.0};
  CHECK_THROWS_AS(extract_features(ragged, 0.2, UnitMode::ms), DataError);

  std::vector<double> speed(50, 5.0), accel(50, 0.0), jerk(50, 0.0);
  speed[10] = std::nan("");
  KinematicSeries nan_series = series_with(speed, accel, jerk);
  CHECK_THROWS_AS(extract_features(nan_series, 5.0, UnitMode::ms), DataError);

  std::vector<TrajectorySample> three{{0.0, 0, 0}, {0.1, 1, 0}, {0.2, 2, 0}};
  CHECK_THROWS_AS(kinematics_from_trajectory(std::span<const TrajectorySample>(three), 0.1),
                  DataError);
}
