#pragma once

#include <array>
#include <span>
#include <vector>

#include "dstyle/filters.hpp"

namespace dstyle {

// Kinematic signals on a uniform time grid. All vectors share one length.
struct KinematicSeries {
  std::vector<double> t;
  std::vector<double> speed;       // m/s
  std::vector<double> accel_long;  // m/s^2, signed
  std::vector<double> accel_lat;   // m/s^2, signed
  std::vector<double> jerk_lat;    // m/s^3, signed
};

enum class UnitMode { kmh, ms };

// The four classification features of one time window.
struct FeatureVector {
  double mean_velocity = 0.0;      // km/h (UnitMode::kmh) or m/s
  double mean_accel = 0.0;         // m/s^2, mean over strictly positive samples
  double mean_decel = 0.0;         // m/s^2, magnitude mean over strictly negative samples
  double std_lateral_jerk = 0.0;   // m/s^3, population standard deviation

  std::array<double, 4> to_array() const {
    return {mean_velocity, mean_accel, mean_decel, std_lateral_jerk};
  }
};

// Derivative chain on filtered states: speed and yaw rate come straight from
// the filter, lateral acceleration is speed * yaw_rate.
KinematicSeries kinematics_from_trajectory(std::span<const KinematicState> states, double dt);

// Derivative chain on plain positions: velocities and accelerations by finite
// differences, lateral acceleration as the cross product (vx*ay - vy*ax) over
// speed (zero where speed vanishes).
KinematicSeries kinematics_from_trajectory(std::span<const TrajectorySample> samples, double dt);

// Features over the first `window` seconds of the series.
FeatureVector extract_features(const KinematicSeries& ks, double window = 5.0,
                               UnitMode mode = UnitMode::kmh);

// Non-overlapping windows of `window` seconds; the trailing remainder that
// does not fill a window is dropped.
std::vector<KinematicSeries> split_windows(const KinematicSeries& ks, double window);

}  // namespace dstyle
