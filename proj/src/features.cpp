#include "dstyle/features.hpp"

#include <cmath>

#include "dstyle/errors.hpp"

namespace dstyle {
namespace {

constexpr double kSpeedEps = 1e-9;

void check_series(const KinematicSeries& ks) {
  std::size_t n = ks.t.size();
  if (ks.speed.size() != n || ks.accel_long.size() != n || ks.accel_lat.size() != n ||
      ks.jerk_lat.size() != n)
    throw DataError("LengthMismatch", "kinematic series columns differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::isfinite(ks.t[i]) && std::isfinite(ks.speed[i]) && std::isfinite(ks.accel_long[i]) &&
          std::isfinite(ks.accel_lat[i]) && std::isfinite(ks.jerk_lat[i])))
      throw DataError("NonFiniteInput", "kinematic series has non-finite entries");
  }
}

}  // namespace

KinematicSeries kinematics_from_trajectory(std::span<const KinematicState> states, double dt) {
  if (states.size() < 4) throw DataError("TooShort", "need at least 4 filtered states");
  KinematicSeries ks;
  const std::size_t n = states.size();
  ks.t.resize(n);
  ks.speed.resize(n);
  ks.accel_lat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ks.t[i] = states[i].t;
    ks.speed[i] = states[i].speed;
    ks.accel_lat[i] = states[i].speed * states[i].yaw_rate;
  }
  ks.accel_long = derivative_series(ks.speed, dt, 1);
  ks.jerk_lat = derivative_series(ks.accel_lat, dt, 1);
  check_series(ks);
  return ks;
}

KinematicSeries kinematics_from_trajectory(std::span<const TrajectorySample> samples, double dt) {
  if (samples.size() < 4) throw DataError("TooShort", "need at least 4 position samples");
  const std::size_t n = samples.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = samples[i].x;
    ys[i] = samples[i].y;
  }
  std::vector<double> vx = derivative_series(xs, dt, 1);
  std::vector<double> vy = derivative_series(ys, dt, 1);
  std::vector<double> ax = derivative_series(vx, dt, 1);
  std::vector<double> ay = derivative_series(vy, dt, 1);

  KinematicSeries ks;
  ks.t.resize(n);
  ks.speed.resize(n);
  ks.accel_lat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ks.t[i] = samples[i].t;
    ks.speed[i] = std::hypot(vx[i], vy[i]);
    ks.accel_lat[i] =
        ks.speed[i] > kSpeedEps ? (vx[i] * ay[i] - vy[i] * ax[i]) / ks.speed[i] : 0.0;
  }
  ks.accel_long = derivative_series(ks.speed, dt, 1);
  ks.jerk_lat = derivative_series(ks.accel_lat, dt, 1);
  check_series(ks);
  return ks;
}

FeatureVector extract_features(const KinematicSeries& ks, double window, UnitMode mode) {
  check_series(ks);
  if (!(window > 0.0)) throw ConfigError("InvalidWindow", "window length must be positive");
  const std::size_t n = ks.t.size();
  if (n < 2) throw DataError("WindowTooShort", "kinematic series has fewer than two samples");
  const double dt = (ks.t.back() - ks.t.front()) / static_cast<double>(n - 1);
  const std::size_t want = static_cast<std::size_t>(std::llround(window / dt));
  if (want < 2 || n < want)
    throw DataError("WindowTooShort", "series does not span the requested window");

  FeatureVector f;
  double vsum = 0.0;
  for (std::size_t i = 0; i < want; ++i) vsum += ks.speed[i];
  f.mean_velocity = vsum / static_cast<double>(want);
  if (mode == UnitMode::kmh) f.mean_velocity *= 3.6;

  double asum = 0.0, dsum = 0.0;
  std::size_t acount = 0, dcount = 0;
  for (std::size_t i = 0; i < want; ++i) {
    double a = ks.accel_long[i];
    if (a > 0.0) {
      asum += a;
      ++acount;
    } else if (a < 0.0) {
      dsum += -a;
      ++dcount;
    }
  }
  f.mean_accel = acount ? asum / static_cast<double>(acount) : 0.0;
  f.mean_decel = dcount ? dsum / static_cast<double>(dcount) : 0.0;

  double jmean = 0.0;
  for (std::size_t i = 0; i < want; ++i) jmean += ks.jerk_lat[i];
  jmean /= static_cast<double>(want);
  double jss = 0.0;
  for (std::size_t i = 0; i < want; ++i)
    jss += (ks.jerk_lat[i] - jmean) * (ks.jerk_lat[i] - jmean);
  f.std_lateral_jerk = std::sqrt(jss / static_cast<double>(want));
  return f;
}

std::vector<KinematicSeries> split_windows(const KinematicSeries& ks, double window) {
  check_series(ks);
  if (!(window > 0.0)) throw ConfigError("InvalidWindow", "window length must be positive");
  const std::size_t n = ks.t.size();
  if (n < 2) return {};
  const double dt = (ks.t.back() - ks.t.front()) / static_cast<double>(n - 1);
  const std::size_t w = static_cast<std::size_t>(std::llround(window / dt));
  if (w < 2) throw ConfigError("InvalidWindow", "window spans fewer than two samples");

  std::vector<KinematicSeries> out;
  for (std::size_t start = 0; start + w <= n; start += w) {
    KinematicSeries part;
    auto slice = [&](const std::vector<double>& src) {
      return std::vector<double>(src.begin() + start, src.begin() + start + w);
    };
    part.t = slice(ks.t);
    part.speed = slice(ks.speed);
    part.accel_long = slice(ks.accel_long);
    part.accel_lat = slice(ks.accel_lat);
    part.jerk_lat = slice(ks.jerk_lat);
    out.push_back(std::move(part));
  }
  return out;
}

}  // namespace dstyle
