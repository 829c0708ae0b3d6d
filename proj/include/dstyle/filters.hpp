#pragma once

#include <span>
#include <string>
#include <vector>

namespace dstyle {

struct TrajectorySample {
  double t;
  double x;
  double y;
};

// One agent's position track, strictly increasing in t.
struct Trajectory {
  std::string agent_id;
  std::vector<TrajectorySample> samples;
};

// Mean sample spacing; throws NonUniformSampling when any step deviates from
// it by more than rel_tol.
double uniform_dt(std::span<const TrajectorySample> samples, double rel_tol = 0.01);

struct SgConfig {
  int poly_degree = 3;
  int window_len = 11;  // odd, > poly_degree
};

// Savitzky-Golay least-squares smoothing of x and y. Interior samples take
// the centered fit; the first and last half-windows re-evaluate the edge
// window's polynomial off-center, so polynomials up to poly_degree pass
// through unchanged everywhere.
Trajectory sg_smooth(const Trajectory& traj, const SgConfig& cfg);

struct EkfConfig {
  double sigma_accel = 1.0;      // process noise, longitudinal [m/s^2]
  double sigma_yaw_accel = 0.5;  // process noise, yaw acceleration [rad/s^2]
  double sigma_pos = 0.1;        // measurement noise [m]
  double init_cov_scale = 1.0;
};

struct KinematicState {
  double t;
  double x;
  double y;
  double heading;
  double speed;
  double yaw_rate;
};

struct EkfResult {
  std::vector<KinematicState> states;  // one per input sample
  std::vector<double> cov_traces;      // posterior covariance trace per step
};

// Extended Kalman filter over a constant turn rate / velocity motion model
// with position-only measurements. State: (x, y, heading, speed, yaw_rate).
EkfResult ekf_smooth(const Trajectory& traj, const EkfConfig& cfg);

// Finite-difference derivative of the given order (1, 2 or 3): central
// stencils inside, one-sided at the boundaries. Exact on quadratics for
// order 1 and on cubics for orders 2 and 3.
std::vector<double> derivative_series(std::span<const double> values, double dt, int order);

}  // namespace dstyle
