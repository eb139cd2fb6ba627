#pragma once

#include <cmath>
#include <type_traits>
#include <vector>

#include "dmp/errors.hpp"
#include "dmp/manifold.hpp"

namespace dmp {

/// Timestamped samples of a motion with optional tangent-space derivatives.
/// Velocities and accelerations are stored row-wise (one row per sample) in the
/// tangent coordinates of the formulation: R^J directly, world-frame angular
/// velocity for S3/SO(3), Mandel vectors at the first sample for SPD.
template <class Point>
struct Trajectory {
  std::vector<double> times;
  std::vector<Point> samples;
  MatrixXd velocity;
  MatrixXd acceleration;
  std::vector<double> phase;  ///< filled by rollouts

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  bool has_derivatives() const {
    return velocity.rows() == static_cast<Eigen::Index>(size()) && acceleration.rows() == velocity.rows() &&
           !empty();
  }
  double duration() const { return empty() ? 0.0 : times.back() - times.front(); }

  /// Throws DegenerateDemo unless there are >= 3 samples at strictly increasing finite times.
  void validate_demo() const {
    if (times.size() != samples.size()) throw DimensionMismatch("times and samples differ in length");
    if (size() < 3) throw DegenerateDemo("a demonstration needs at least 3 samples");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i])) throw DegenerateDemo("non-finite timestamp");
      if (i > 0 && !(times[i] > times[i - 1])) throw DegenerateDemo("timestamps must be strictly increasing");
    }
    if (!(duration() > 0.0)) throw DegenerateDemo("demonstration has zero duration");
  }
};

template <class Point>
using Demonstration = Trajectory<Point>;

// ---------------------------------------------------------------------------
// Charts: local tangent coordinates of `p` around `base`.
// ---------------------------------------------------------------------------

struct EuclideanChart {
  VectorXd local(const VectorXd& base, const VectorXd& p) const {
    if (base.size() != p.size()) throw DimensionMismatch("samples differ in dimension");
    if (!p.allFinite()) throw DegenerateDemo("non-finite sample");
    return p - base;
  }
};

struct QuaternionChart {
  VectorXd local(const UnitQuaternion& base, const UnitQuaternion& p) const { return quat_error(p, base); }
};

struct RotationChart {
  VectorXd local(const Rotation3& base, const Rotation3& p) const { return rot_log(p * base.transpose()); }
};

/// Tangent vectors are transported to `frame` so every sample shares one basis.
struct SpdChart {
  SpdMatrix frame;
  VectorXd local(const SpdMatrix& base, const SpdMatrix& p) const {
    return mandel_vec(spd_transport(base, frame, spd_log(base, p)));
  }
};

template <class Point>
struct DefaultChart;
template <>
struct DefaultChart<VectorXd> {
  using type = EuclideanChart;
};
template <>
struct DefaultChart<UnitQuaternion> {
  using type = QuaternionChart;
};
template <>
struct DefaultChart<Rotation3> {
  using type = RotationChart;
};

/// Consecutive quaternions flipped onto a common hemisphere.
inline std::vector<UnitQuaternion> sign_aligned(const std::vector<UnitQuaternion>& qs) {
  std::vector<UnitQuaternion> out = qs;
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = align_hemisphere(out[i], out[i - 1]);
  return out;
}

namespace detail {

// Weights of the derivative at t[at] of the quadratic through (t0, t1, t2).
inline Eigen::Vector3d lagrange_d1(double t0, double t1, double t2, double at) {
  return {(2 * at - t1 - t2) / ((t0 - t1) * (t0 - t2)), (2 * at - t0 - t2) / ((t1 - t0) * (t1 - t2)),
          (2 * at - t0 - t1) / ((t2 - t0) * (t2 - t1))};
}

// Three-point stencil for sample j: centred in the interior, one-sided at the ends.
inline std::size_t stencil_start(std::size_t j, std::size_t n) {
  if (j == 0) return 0;
  if (j + 1 == n) return n - 3;
  return j - 1;
}

template <class Point, class Chart>
MatrixXd differentiate(const std::vector<double>& t, const std::vector<Point>& pts, const Chart& chart) {
  const std::size_t n = pts.size();
  const Eigen::Index dim = chart.local(pts[0], pts[0]).size();
  MatrixXd d(n, dim);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t s = stencil_start(j, n);
    const Eigen::Vector3d w = lagrange_d1(t[s], t[s + 1], t[s + 2], t[j]);
    VectorXd acc = VectorXd::Zero(dim);
    for (std::size_t k = 0; k < 3; ++k) {
      if (s + k == j) continue;  // local(p, p) = 0
      acc += w[k] * chart.local(pts[j], pts[s + k]);
    }
    d.row(j) = acc.transpose();
  }
  return d;
}

}  // namespace detail

/// Second-order finite differences on nonuniform grids. Geometric samples are
/// differenced through `chart` around the centre sample of each stencil.
template <class Point, class Chart>
Trajectory<Point> estimate_derivatives(const Trajectory<Point>& demo, const Chart& chart) {
  demo.validate_demo();
  Trajectory<Point> out = demo;
  if constexpr (std::is_same_v<Point, UnitQuaternion>) {
    out.velocity = detail::differentiate(demo.times, sign_aligned(demo.samples), chart);
  } else {
    out.velocity = detail::differentiate(demo.times, demo.samples, chart);
  }
  std::vector<VectorXd> rows(out.size());
  for (std::size_t j = 0; j < out.size(); ++j) rows[j] = out.velocity.row(j).transpose();
  out.acceleration = detail::differentiate(demo.times, rows, EuclideanChart{});
  return out;
}

template <class Point>
Trajectory<Point> estimate_derivatives(const Trajectory<Point>& demo) {
  if constexpr (std::is_same_v<Point, SpdMatrix>) {
    if (demo.samples.empty()) throw DegenerateDemo("empty demonstration");
    return estimate_derivatives(demo, SpdChart{demo.samples.front()});
  } else {
    return estimate_derivatives(demo, typename DefaultChart<Point>::type{});
  }
}

/// Ensures derivatives are present, estimating them when missing.
template <class Point>
Trajectory<Point> with_derivatives(const Trajectory<Point>& demo) {
  demo.validate_demo();
  return demo.has_derivatives() ? demo : estimate_derivatives(demo);
}

/// Samples of an R^J trajectory as a T x J matrix.
inline MatrixXd as_matrix(const Trajectory<VectorXd>& traj) {
  if (traj.empty()) return {};
  MatrixXd m(traj.size(), traj.samples.front().size());
  for (std::size_t i = 0; i < traj.size(); ++i) m.row(i) = traj.samples[i].transpose();
  return m;
}

}  // namespace dmp
