#include "dstyle/filters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "dstyle/errors.hpp"

namespace dstyle {

double uniform_dt(std::span<const TrajectorySample> samples, double rel_tol) {
  if (samples.size() < 2)
    throw DataError("TooShort", "need at least two samples to derive a sample interval");
  double dt = (samples.back().t - samples.front().t) / static_cast<double>(samples.size() - 1);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw DataError("NonUniformSampling", "timestamps must increase");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    double step = samples[i].t - samples[i - 1].t;
    if (std::abs(step - dt) > rel_tol * dt)
      throw DataError("NonUniformSampling",
                      "sample interval deviates at t = " + std::to_string(samples[i].t));
  }
  return dt;
}

namespace {

// Least-squares polynomial weights: row d of the result gives the weights
// that evaluate the window's fitted polynomial at integer offset `d` from
// the window start.
Eigen::MatrixXd sg_weights(int window, int degree) {
  Eigen::MatrixXd A(window, degree + 1);
  for (int i = 0; i < window; ++i) {
    double off = i - (window - 1) / 2.0;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      A(i, j) = p;
      p *= off;
    }
  }
  // C maps window samples to polynomial coefficients.
  Eigen::MatrixXd C = (A.transpose() * A).ldlt().solve(A.transpose());
  Eigen::MatrixXd W(window, window);
  for (int d = 0; d < window; ++d) {
    double off = d - (window - 1) / 2.0;
    Eigen::RowVectorXd powers(degree + 1);
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      powers(j) = p;
      p *= off;
    }
    W.row(d) = powers * C;
  }
  return W;
}

}  // namespace

Trajectory sg_smooth(const Trajectory& traj, const SgConfig& cfg) {
  if (cfg.poly_degree < 1) throw ConfigError("InvalidFilter", "polynomial degree must be >= 1");
  if (cfg.window_len % 2 == 0 || cfg.window_len <= cfg.poly_degree)
    throw ConfigError("InvalidFilter", "window length must be odd and exceed the degree");
  const int w = cfg.window_len;
  const int n = static_cast<int>(traj.samples.size());
  if (n < w)
    throw DataError("TooShort", "trajectory " + traj.agent_id + " shorter than the filter window");
  uniform_dt(traj.samples);
  for (const auto& s : traj.samples)
    if (!(std::isfinite(s.x) && std::isfinite(s.y)))
      throw DataError("NonFiniteInput", "trajectory " + traj.agent_id + " has non-finite positions");

  const Eigen::MatrixXd W = sg_weights(w, cfg.poly_degree);
  const int h = (w - 1) / 2;

  Trajectory out = traj;
  auto apply = [&](auto get, auto set) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = get(traj.samples[i]);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
      int start, d;
      if (i < h) {
        start = 0;
        d = i;
      } else if (i >= n - h) {
        start = n - w;
        d = i - start;
      } else {
        start = i - h;
        d = h;
      }
      double acc = 0.0;
      for (int j = 0; j < w; ++j) acc += W(d, j) * v[start + j];
      r[i] = acc;
    }
    for (int i = 0; i < n; ++i) set(out.samples[i], r[i]);
  };
  apply([](const TrajectorySample& s) { return s.x; },
        [](TrajectorySample& s, double v) { s.x = v; });
  apply([](const TrajectorySample& s) { return s.y; },
        [](TrajectorySample& s, double v) { s.y = v; });
  return out;
}

namespace {

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  while (a > pi) a -= 2.0 * pi;
  while (a < -pi) a += 2.0 * pi;
  return a;
}

}  // namespace

EkfResult ekf_smooth(const Trajectory& traj, const EkfConfig& cfg) {
  const auto& s = traj.samples;
  if (s.size() < 5)
    throw DataError("TooShort", "trajectory " + traj.agent_id + " needs at least 5 samples");
  for (const auto& p : s) {
    if (!(std::isfinite(p.t) && std::isfinite(p.x) && std::isfinite(p.y)))
      throw DataError("NonFiniteInput", "trajectory " + traj.agent_id + " has non-finite samples");
  }
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i].t > s[i - 1].t))
      throw DataError("NonUniformSampling", "timestamps must strictly increase");
  if (!(cfg.sigma_accel > 0 && cfg.sigma_yaw_accel > 0 && cfg.sigma_pos > 0 &&
        cfg.init_cov_scale > 0))
    throw ConfigError("InvalidFilter", "EKF noise parameters must be positive");

  using Vec5 = Eigen::Matrix<double, 5, 1>;
  using Mat5 = Eigen::Matrix<double, 5, 5>;

  Vec5 xs = Vec5::Zero();
  xs(0) = s[0].x;
  xs(1) = s[0].y;
  {
    double dt0 = s[1].t - s[0].t;
    double dx = s[1].x - s[0].x, dy = s[1].y - s[0].y;
    double d = std::hypot(dx, dy);
    xs(2) = d > 1e-12 ? std::atan2(dy, dx) : 0.0;
    xs(3) = d / dt0;
    xs(4) = 0.0;
  }
  Mat5 P = cfg.init_cov_scale * Mat5::Identity();

  const Eigen::Matrix<double, 2, 5> H = [] {
    Eigen::Matrix<double, 2, 5> h = Eigen::Matrix<double, 2, 5>::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    return h;
  }();
  const Eigen::Matrix2d R = cfg.sigma_pos * cfg.sigma_pos * Eigen::Matrix2d::Identity();

  EkfResult out;
  out.states.reserve(s.size());
  out.cov_traces.reserve(s.size());
  out.states.push_back({s[0].t, xs(0), xs(1), xs(2), xs(3), xs(4)});
  out.cov_traces.push_back(P.trace());

  for (std::size_t i = 1; i < s.size(); ++i) {
    const double dt = s[i].t - s[i - 1].t;
    const double th = xs(2), v = xs(3), om = xs(4);

    // Constant turn rate and velocity prediction.
    Vec5 xp = xs;
    Mat5 F = Mat5::Identity();
    if (std::abs(om) > 1e-6) {
      double thn = th + om * dt;
      double sth = std::sin(th), cth = std::cos(th);
      double sthn = std::sin(thn), cthn = std::cos(thn);
      xp(0) = xs(0) + v / om * (sthn - sth);
      xp(1) = xs(1) + v / om * (cth - cthn);
      xp(2) = thn;
      F(0, 2) = v / om * (cthn - cth);
      F(0, 3) = (sthn - sth) / om;
      F(0, 4) = v * (cthn * dt / om - (sthn - sth) / (om * om));
      F(1, 2) = v / om * (sthn - sth);
      F(1, 3) = (cth - cthn) / om;
      F(1, 4) = v * (sthn * dt / om - (cth - cthn) / (om * om));
      F(2, 4) = dt;
    } else {
      double sth = std::sin(th), cth = std::cos(th);
      xp(0) = xs(0) + v * cth * dt;
      xp(1) = xs(1) + v * sth * dt;
      xp(2) = th + om * dt;
      F(0, 2) = -v * sth * dt;
      F(0, 3) = cth * dt;
      F(0, 4) = -0.5 * v * sth * dt * dt;
      F(1, 2) = v * cth * dt;
      F(1, 3) = sth * dt;
      F(1, 4) = 0.5 * v * cth * dt * dt;
      F(2, 4) = dt;
    }

    Eigen::Matrix<double, 5, 2> G = Eigen::Matrix<double, 5, 2>::Zero();
    G(0, 0) = 0.5 * dt * dt * std::cos(th);
    G(1, 0) = 0.5 * dt * dt * std::sin(th);
    G(3, 0) = dt;
    G(2, 1) = 0.5 * dt * dt;
    G(4, 1) = dt;
    Eigen::Matrix2d Qd = Eigen::Matrix2d::Zero();
    Qd(0, 0) = cfg.sigma_accel * cfg.sigma_accel;
    Qd(1, 1) = cfg.sigma_yaw_accel * cfg.sigma_yaw_accel;

    P = F * P * F.transpose() + G * Qd * G.transpose();
    xs = xp;

    // Position update, Joseph-form covariance.
    Eigen::Vector2d z(s[i].x, s[i].y);
    Eigen::Matrix2d S = H * P * H.transpose() + R;
    Eigen::Matrix<double, 5, 2> K = P * H.transpose() * S.inverse();
    xs += K * (z - H * xs);
    xs(2) = wrap_angle(xs(2));
    Mat5 IKH = Mat5::Identity() - K * H;
    P = IKH * P * IKH.transpose() + K * R * K.transpose();
    P = 0.5 * (P + P.transpose());

    double tr = P.trace();
    if (!std::isfinite(tr) || tr <= 0.0 || !xs.allFinite())
      throw NumericError("DegenerateCovariance",
                         "EKF diverged on trajectory " + traj.agent_id + " at t = " +
                             std::to_string(s[i].t));

    out.states.push_back({s[i].t, xs(0), xs(1), xs(2), xs(3), xs(4)});
    out.cov_traces.push_back(tr);
  }
  return out;
}

std::vector<double> derivative_series(std::span<const double> values, double dt, int order) {
  if (order < 1 || order > 3) throw ConfigError("InvalidFilter", "derivative order must be 1..3");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("InvalidFilter", "sample interval must be positive");
  const int n = static_cast<int>(values.size());
  const int min_len = order == 1 ? 3 : 4;
  if (n < min_len)
    throw DataError("TooShort", "derivative of order " + std::to_string(order) + " needs " +
                                    std::to_string(min_len) + " samples");
  for (double v : values)
    if (!std::isfinite(v)) throw DataError("NonFiniteInput", "derivative input must be finite");

  std::vector<double> d(n);
  const auto& f = values;
  switch (order) {
    case 1:
      d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
      for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dt);
      d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
      break;
    case 2:
      d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (dt * dt);
      for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dt * dt);
      d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (dt * dt);
      break;
    case 3: {
      const double h3 = dt * dt * dt;
      // Any four consecutive samples give the cubic interpolant's constant
      // third derivative.
      auto oneside = [&](int s0) { return (-f[s0] + 3.0 * f[s0 + 1] - 3.0 * f[s0 + 2] + f[s0 + 3]) / h3; };
      for (int i = 0; i < n; ++i) {
        if (i >= 2 && i < n - 2)
          d[i] = (f[i + 2] - 2.0 * f[i + 1] + 2.0 * f[i - 1] - f[i - 2]) / (2.0 * h3);
        else if (i < 2)
          d[i] = oneside(0);
        else
          d[i] = oneside(n - 4);
      }
      break;
    }
  }
  return d;
}

}  // namespace dstyle
