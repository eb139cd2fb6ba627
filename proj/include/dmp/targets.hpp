#pragma once

// Time-varying goals used when primitives are chained: the delayed goal that
// ramps along each leg of a sequence, and the moving target that lets a
// primitive pass its goal with a prescribed velocity.

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include "dmp/errors.hpp"
#include "dmp/manifold.hpp"

namespace dmp {

namespace detail {

inline VectorXd geodesic_point(const VectorXd& a, const VectorXd& b, double s) { return a + s * (b - a); }
inline UnitQuaternion geodesic_point(const UnitQuaternion& a, const UnitQuaternion& b, double s) {
  return quat_slerp(a, b, s);
}

// Moves `g` by the fraction ds of the leg a -> b.
inline VectorXd geodesic_advance(const VectorXd& g, const VectorXd& a, const VectorXd& b, double ds) {
  return g + ds * (b - a);
}
inline UnitQuaternion geodesic_advance(const UnitQuaternion& g, const UnitQuaternion& a, const UnitQuaternion& b,
                                       double ds) {
  return quat_exp(ds * quat_log(align_hemisphere(b, a) * a.conjugate())) * g;
}

}  // namespace detail

/// Piecewise goal: leg l travels from the previous leg's goal (or `start`) to
/// goals[l] at constant rate over durations[l] seconds, then holds.
template <class Point>
struct DelayedGoal {
  Point start;
  std::vector<Point> goals;
  std::vector<double> durations;

  void validate() const {
    if (goals.empty() || goals.size() != durations.size()) throw InvalidArgument("delayed goal needs one duration per leg");
    for (double d : durations) {
      if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("leg durations must be positive");
    }
  }

  double total_duration() const {
    double t = 0.0;
    for (double d : durations) t += d;
    return t;
  }

  const Point& leg_start(std::size_t l) const { return l == 0 ? start : goals[l - 1]; }

  /// Closed-form value at time t >= 0.
  Point at(double t) const {
    double begin = 0.0;
    for (std::size_t l = 0; l < goals.size(); ++l) {
      const double end = begin + durations[l];
      if (t < end) return detail::geodesic_point(leg_start(l), goals[l], std::max(0.0, t - begin) / durations[l]);
      begin = end;
    }
    return goals.back();
  }

  bool operator==(const DelayedGoal&) const = default;
};

/// Integrates the delayed goal from t to t + dt starting at `current`.
template <class Point>
Point delayed_goal_step(const DelayedGoal<Point>& dg, double t, double dt, const Point& current) {
  if (!(t >= 0.0)) throw InvalidArgument("delayed goal time must be >= 0");
  if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
  Point g = current;
  double begin = 0.0;
  for (std::size_t l = 0; l < dg.goals.size(); ++l) {
    const double end = begin + dg.durations[l];
    const double overlap = std::min(end, t + dt) - std::max(begin, t);
    if (overlap > 0.0) g = detail::geodesic_advance(g, dg.leg_start(l), dg.goals[l], overlap / dg.durations[l]);
    begin = end;
  }
  return g;
}

/// Target moving at `rate` that reaches `goal` at time `T`:
/// g(t) = goal - (T - t) rate in R^J, Exp((t - T) rate / 2) * goal on S3.
template <class Point>
struct MovingTarget {
  Point goal;
  VectorXd rate;
  double T = 1.0;

  Point at(double t) const {
    if constexpr (std::is_same_v<Point, UnitQuaternion>) {
      return quat_exp(0.5 * (t - T) * Vec3(rate)) * goal;
    } else {
      return goal - (T - t) * rate;
    }
  }

  /// Elapsed time recovered from an exponential phase value, t = -tau ln(x) / alpha_x.
  static double time_from_phase(double x, double tau, double alpha_x) { return -tau * std::log(x) / alpha_x; }
};

}  // namespace dmp
