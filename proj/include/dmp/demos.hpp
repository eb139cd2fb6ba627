#pragma once

// Synthetic demonstrations: minimum-jerk point-to-point motions in R^J, on S3,
// SO(3) and the SPD manifold, plus a noisy cosine for rhythmic learning.

#include <cmath>
#include <random>

#include "dmp/manifold.hpp"
#include "dmp/trajectory.hpp"

namespace dmp {

/// 10u^3 - 15u^4 + 6u^5 and its first two derivatives with respect to u.
inline double min_jerk(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
inline double min_jerk_d1(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
inline double min_jerk_d2(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

namespace detail {

inline std::vector<double> uniform_times(double duration, double dt) {
  if (!(duration > 0.0) || !(dt > 0.0)) throw InvalidArgument("duration and dt must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  if (n < 2) throw InvalidArgument("demo needs at least three samples");
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = duration * static_cast<double>(k) / static_cast<double>(n);
  return t;
}

}  // namespace detail

/// Minimum-jerk motion from a to b with exact derivatives.
inline Demonstration<VectorXd> min_jerk_demo(const VectorXd& a, const VectorXd& b, double duration, double dt = 0.01) {
  if (a.size() != b.size()) throw DimensionMismatch("endpoints differ in dimension");
  Demonstration<VectorXd> d;
  d.times = detail::uniform_times(duration, dt);
  const auto n = static_cast<Eigen::Index>(d.times.size());
  d.velocity.resize(n, a.size());
  d.acceleration.resize(n, a.size());
  const VectorXd delta = b - a;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double u = d.times[static_cast<std::size_t>(k)] / duration;
    d.samples.push_back(a + min_jerk(u) * delta);
    d.velocity.row(k) = (min_jerk_d1(u) / duration * delta).transpose();
    d.acceleration.row(k) = (min_jerk_d2(u) / (duration * duration) * delta).transpose();
  }
  return d;
}

/// Minimum-jerk progress along the S3 geodesic from a to b.
inline Demonstration<UnitQuaternion> min_jerk_demo(const UnitQuaternion& a, const UnitQuaternion& b, double duration,
                                                   double dt = 0.01) {
  Demonstration<UnitQuaternion> d;
  d.times = detail::uniform_times(duration, dt);
  for (double t : d.times) d.samples.push_back(quat_slerp(a, b, min_jerk(t / duration)));
  return d;
}

inline Demonstration<Rotation3> min_jerk_demo(const Rotation3& a, const Rotation3& b, double duration,
                                              double dt = 0.01) {
  Demonstration<Rotation3> d;
  d.times = detail::uniform_times(duration, dt);
  const Vec3 w = rot_log(b * a.transpose());
  for (double t : d.times) d.samples.push_back(rot_exp(min_jerk(t / duration) * w) * a);
  return d;
}

inline Demonstration<SpdMatrix> min_jerk_demo(const SpdMatrix& a, const SpdMatrix& b, double duration,
                                              double dt = 0.01) {
  Demonstration<SpdMatrix> d;
  d.times = detail::uniform_times(duration, dt);
  for (double t : d.times) d.samples.push_back(spd_geodesic(a, b, min_jerk(t / duration)));
  return d;
}

/// cos(2 pi t) plus Gaussian noise of standard deviation `sigma`.
inline Demonstration<VectorXd> noisy_cosine_demo(double duration, double dt, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Demonstration<VectorXd> d;
  d.times = detail::uniform_times(duration, dt);
  for (double t : d.times) d.samples.push_back(VectorXd::Constant(1, std::cos(2.0 * kPi * t) + noise(rng)));
  return d;
}

}  // namespace dmp
