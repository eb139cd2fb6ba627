#pragma once

// Reference setups for the standard figures (min-jerk reaching on every
// manifold, a noisy rhythmic demo, and the three joining strategies), with
// the metrics used to judge them and plot-ready export.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dmp/coupling.hpp"
#include "dmp/demos.hpp"
#include "dmp/discrete.hpp"
#include "dmp/geometric.hpp"
#include "dmp/io.hpp"
#include "dmp/joining.hpp"
#include "dmp/periodic.hpp"

namespace dmp::scenarios {

using Metrics = std::map<std::string, double>;

// ---------------------------------------------------------------------------
// Fig. 2: discrete reaching in R^1
// ---------------------------------------------------------------------------

struct Fig2 {
  Demonstration<VectorXd> demo;
  DiscreteDmp model;
  Trajectory<VectorXd> rollout;
  Metrics metrics;  ///< rmse, end_error
};

inline Fig2 fig2() {
  Fig2 r;
  r.demo = min_jerk_demo(VectorXd::Zero(1), VectorXd::Ones(1), 1.0, 0.01);
  TrainOptions o;
  o.kernels = 10;
  r.model = train_discrete(r.demo, o);
  RolloutOptions ro;
  ro.dt = 0.01;
  ro.duration = 1.0;
  ro.integrator = Integrator::RungeKutta4;
  r.rollout = rollout(r.model, ro);
  double se = 0.0;
  for (std::size_t k = 0; k < r.demo.size(); ++k) se += (r.rollout.samples[k] - r.demo.samples[k]).squaredNorm();
  r.metrics["rmse"] = std::sqrt(se / static_cast<double>(r.demo.size()));
  r.metrics["end_error"] = std::abs(r.rollout.samples.back()[0] - 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Figs. 4, 5: orientation reaching
// ---------------------------------------------------------------------------

inline UnitQuaternion fig4_start() { return UnitQuaternion::identity(); }
inline UnitQuaternion fig4_goal() { return quat_exp(Vec3(0.4, -0.7, 0.9)); }

struct Fig4 {
  Demonstration<UnitQuaternion> demo;
  QuaternionDmp model;
  Trajectory<UnitQuaternion> rollout;
  Metrics metrics;  ///< max_norm_error, terminal_distance, max_tracking_error
};

inline Fig4 fig4() {
  Fig4 r;
  r.demo = min_jerk_demo(fig4_start(), fig4_goal(), 10.0, 0.01);
  TrainOptions o;
  o.kernels = 20;
  r.model = train_quaternion(r.demo, o);
  QuaternionRolloutOptions ro;
  ro.duration = 10.0;
  r.rollout = rollout(r.model, ro);
  double nerr = 0.0, track = 0.0;
  for (std::size_t k = 0; k < r.rollout.size(); ++k) {
    nerr = std::max(nerr, std::abs(r.rollout.samples[k].norm() - 1.0));
    track = std::max(track, quat_distance(r.rollout.samples[k], r.demo.samples[k]));
  }
  r.metrics["max_norm_error"] = nerr;
  r.metrics["max_tracking_error"] = track;
  r.metrics["terminal_distance"] = quat_distance(r.rollout.samples.back(), r.model.goal);
  return r;
}

struct Fig5 {
  Demonstration<Rotation3> demo;
  RotationDmp model;
  Trajectory<Rotation3> rollout;
  Metrics metrics;  ///< max_orthogonality_error, max_det_error, terminal_distance
};

inline Fig5 fig5() {
  Fig5 r;
  r.demo = min_jerk_demo(to_rotation(fig4_start()), to_rotation(fig4_goal()), 10.0, 0.01);
  TrainOptions o;
  o.kernels = 20;
  r.model = train_rotation(r.demo, o);
  RotationRolloutOptions ro;
  ro.duration = 10.0;
  r.rollout = rollout(r.model, ro);
  double orth = 0.0, det = 0.0;
  for (const Rotation3& R : r.rollout.samples) {
    orth = std::max(orth, (R.matrix().transpose() * R.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff());
    det = std::max(det, std::abs(R.matrix().determinant() - 1.0));
  }
  r.metrics["max_orthogonality_error"] = orth;
  r.metrics["max_det_error"] = det;
  r.metrics["terminal_distance"] = rot_log(r.model.goal * r.rollout.samples.back().transpose()).norm();
  return r;
}

// ---------------------------------------------------------------------------
// Fig. 6: rhythmic learning from a noisy cosine
// ---------------------------------------------------------------------------

struct Fig6 {
  Demonstration<VectorXd> demo;
  PeriodicDmp model;
  Trajectory<VectorXd> rollout;
  Metrics metrics;  ///< steady_rmse over t in [3, 4]
};

inline Fig6 fig6(std::uint64_t seed = 7) {
  Fig6 r;
  r.demo = noisy_cosine_demo(2.0, 0.01, 0.01, seed);
  PeriodicTrainOptions o;
  o.kernels = 20;
  r.model = train_periodic(r.demo, 2.0 * kPi, o);
  PeriodicRolloutOptions ro;
  ro.dt = 0.01;
  ro.duration = 4.0;
  r.rollout = rollout(r.model, ro);
  double se = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < r.rollout.size(); ++k) {
    const double t = r.rollout.times[k];
    if (t < 3.0 - 1e-9) continue;
    const double e = r.rollout.samples[k][0] - std::cos(2.0 * kPi * t);
    se += e * e;
    ++n;
  }
  r.metrics["steady_rmse"] = std::sqrt(se / n);
  return r;
}

// ---------------------------------------------------------------------------
// Fig. 7: SPD profile
// ---------------------------------------------------------------------------

inline SpdMatrix fig7_start() { return SpdMatrix((MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished()); }
inline SpdMatrix fig7_goal() { return SpdMatrix((MatrixXd(2, 2) << 0.5, -0.2, -0.2, 3.0).finished()); }

struct Fig7 {
  Demonstration<SpdMatrix> demo;
  SpdDmp model;
  Trajectory<SpdMatrix> rollout;
  Metrics metrics;  ///< min_eigenvalue, terminal_distance, max_tracking_error
};

inline Fig7 fig7() {
  Fig7 r;
  r.demo = min_jerk_demo(fig7_start(), fig7_goal(), 100.0, 0.01);
  TrainOptions o;
  o.kernels = 20;
  r.model = train_spd(r.demo, o);
  SpdRolloutOptions ro;
  ro.duration = 100.0;
  r.rollout = rollout(r.model, ro);
  double lmin = std::numeric_limits<double>::infinity(), track = 0.0;
  for (std::size_t k = 0; k < r.rollout.size(); ++k) {
    lmin = std::min(lmin, r.rollout.samples[k].min_eigenvalue());
    track = std::max(track, spd_distance(r.rollout.samples[k], r.demo.samples[k]));
  }
  r.metrics["min_eigenvalue"] = lmin;
  r.metrics["max_tracking_error"] = track;
  r.metrics["terminal_distance"] = spd_distance(r.rollout.samples.back(), r.model.goal);
  return r;
}

// ---------------------------------------------------------------------------
// Figs. 8-10: two 5 s pose segments joined three ways
// ---------------------------------------------------------------------------

/// Via points of the joining setup: start, via, goal. Positions span a few
/// metres so that the distance criterion is met a few tenths of a second
/// before the nominal end of each segment.
struct JoinWaypoints {
  std::vector<VectorXd> positions;
  std::vector<UnitQuaternion> orientations;
  double segment_duration = 5.0;
};

inline JoinWaypoints join_waypoints() {
  JoinWaypoints w;
  w.positions = {(VectorXd(3) << 0.0, 0.0, 0.0).finished(), (VectorXd(3) << 5.0, 3.0, 1.5).finished(),
                 (VectorXd(3) << 2.0, 6.0, 4.0).finished()};
  const UnitQuaternion q1 = quat_exp(Vec3(0.3, -0.2, 0.4));
  w.orientations = {UnitQuaternion::identity(), q1, quat_exp(Vec3(-0.2, 0.4, 0.6)) * q1};
  return w;
}

struct JoinDemos {
  std::vector<Demonstration<VectorXd>> positions;
  std::vector<Demonstration<UnitQuaternion>> orientations;
};

inline JoinDemos join_demos(const JoinWaypoints& w = join_waypoints(), double dt = 0.01) {
  JoinDemos d;
  for (std::size_t l = 0; l + 1 < w.positions.size(); ++l) {
    d.positions.push_back(min_jerk_demo(w.positions[l], w.positions[l + 1], w.segment_duration, dt));
    d.orientations.push_back(min_jerk_demo(w.orientations[l], w.orientations[l + 1], w.segment_duration, dt));
  }
  return d;
}

inline DmpSequence join_sequence(const JoinDemos& demos, const TrainOptions& o) {
  DmpSequence seq;
  for (std::size_t l = 0; l < demos.positions.size(); ++l) {
    PoseDmp p;
    p.position = train_discrete(demos.positions[l], o);
    p.orientation = train_quaternion(demos.orientations[l], o);
    seq.segments.push_back(std::move(p));
  }
  return seq;
}

struct JoinResult {
  JoinDemos demos;
  DmpSequence sequence;
  PoseTrajectory trajectory;
  std::optional<PoseDmp> joined;  ///< overlay only
  Metrics metrics;
};

/// Fig. 8: velocity-threshold switching with 0.01 m / 0.01 rad thresholds.
inline JoinResult fig8() {
  JoinResult r;
  r.demos = join_demos();
  TrainOptions o;
  o.kernels = 20;
  r.sequence = join_sequence(r.demos, o);
  r.trajectory = join_velocity_threshold(r.sequence, SwitchThresholds{SwitchCriterion::Distance, 0.01, 0.01});
  r.metrics["switch_time"] = r.trajectory.switch_times.front();
  r.metrics["total_duration"] = r.trajectory.duration();
  return r;
}

/// Fig. 9: target crossing at the via point with 0.01 per axis.
inline JoinResult fig9(double crossing = 0.01) {
  JoinResult r;
  r.demos = join_demos();
  TrainOptions o;
  o.kernels = 20;
  o.variant = Variant::TargetCrossing;
  r.sequence = join_sequence(r.demos, o);
  const CrossingVelocity v{VectorXd::Constant(3, crossing), VectorXd::Constant(3, crossing)};
  r.trajectory = join_target_crossing(r.sequence, {v});
  const Trajectory<VectorXd>& p = r.trajectory.position;
  const VectorXd& via = r.demos.positions.front().samples.back();
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if ((p.samples[k] - via).norm() < (p.samples[best] - via).norm()) best = k;
  }
  const auto row = static_cast<Eigen::Index>(best);
  r.metrics["crossing_time"] = p.times[best];
  r.metrics["crossing_distance"] = (p.samples[best] - via).norm();
  r.metrics["crossing_velocity_error"] = (p.velocity.row(row).transpose() - v.position).cwiseAbs().maxCoeff();
  r.metrics["crossing_angular_velocity_error"] =
      (r.trajectory.orientation.velocity.row(row).transpose() - v.orientation).cwiseAbs().maxCoeff();
  r.metrics["switch_time"] = r.trajectory.switch_times.front();
  r.metrics["total_duration"] = r.trajectory.duration();
  return r;
}

/// Fig. 10: basis-function overlay of two sigmoidal-phase segments.
inline JoinResult fig10() {
  JoinResult r;
  r.demos = join_demos();
  TrainOptions o;
  o.kernels = 20;
  o.phase = SigmoidalPhase{};
  o.delayed_goal = true;
  r.sequence = join_sequence(r.demos, o);
  r.joined = join_overlay(r.sequence);
  r.trajectory = rollout(*r.joined);
  const Trajectory<VectorXd>& p = r.trajectory.position;
  double nominal = 0.0;
  for (const PoseDmp& s : r.sequence.segments) nominal += s.duration();
  const auto junction = static_cast<Eigen::Index>(std::llround(r.sequence.segments.front().duration() / 0.01));
  double demo_acc = 0.0;
  for (const auto& d : r.demos.positions) demo_acc = std::max(demo_acc, d.acceleration.rowwise().norm().maxCoeff());
  // Largest one-step velocity change within one step of the junction.
  double jump = 0.0;
  for (Eigen::Index k = junction - 1; k <= junction + 1; ++k) {
    jump = std::max(jump, (p.velocity.row(k + 1) - p.velocity.row(k)).norm());
  }
  r.metrics["kernels"] = static_cast<double>(r.joined->position->forcing.kernels());
  r.metrics["junction_velocity_jump"] = jump;
  r.metrics["demo_max_acceleration"] = demo_acc;
  r.metrics["nominal_duration"] = nominal;
  r.metrics["total_duration"] = r.trajectory.duration();
  r.metrics["via_distance"] = (p.samples[static_cast<std::size_t>(junction)] - r.demos.positions.front().samples.back()).norm();
  return r;
}

// ---------------------------------------------------------------------------
// Gesture corpus for recognition
// ---------------------------------------------------------------------------

struct Gesture {
  std::string label;
  Demonstration<VectorXd> demo;
};

/// Recognition settings for the gesture corpus. The sigmoidal phase keeps every
/// kernel supported by data; an exponential phase leaves the last few kernels
/// ill-conditioned and their weights swamp the correlation.
inline TrainOptions gesture_train_options() {
  TrainOptions o;
  o.phase = SigmoidalPhase{};
  return o;
}

/// Planar lines, arcs, S-curves and loops, `reps` randomized repetitions each.
inline std::vector<Gesture> gesture_corpus(int reps = 5, std::uint64_t seed = 11, double duration = 1.0,
                                           double dt = 0.01) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.8, 1.2);
  std::uniform_real_distribution<double> tilt(-0.1, 0.1);
  std::normal_distribution<double> noise(0.0, 0.002);
  const std::vector<std::string> labels{"line", "arc", "s-curve", "loop"};
  std::vector<Gesture> out;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    for (int rep = 0; rep < reps; ++rep) {
      const double a = scale(rng), th = tilt(rng);
      const Eigen::Rotation2D<double> rot(th);
      Gesture g{labels[c], {}};
      g.demo.times = detail::uniform_times(duration, dt);
      for (double t : g.demo.times) {
        const double u = min_jerk(t / duration);
        Eigen::Vector2d p;
        switch (c) {
          case 0: p = {u, 0.5 * u}; break;
          case 1: p = {0.5 - 0.5 * std::cos(kPi * u), 0.5 * std::sin(kPi * u)}; break;
          case 2: p = {u, 0.25 * std::sin(2.0 * kPi * u)}; break;
          default: p = {u + 0.3 * std::sin(2.0 * kPi * u), 0.3 - 0.3 * std::cos(2.0 * kPi * u)}; break;
        }
        p = a * (rot * p);
        g.demo.samples.push_back((VectorXd(2) << p.x() + noise(rng), p.y() + noise(rng)).finished());
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig2", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
  return names;
}

namespace detail {

inline void write_metrics(const std::filesystem::path& path, const Metrics& m,
                          const std::vector<double>& switch_times = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  for (const auto& [k, v] : m) out << k << ' ' << dmp::detail::format_double(v) << '\n';
  for (double t : switch_times) out << "switch " << dmp::detail::format_double(t) << '\n';
}

inline void write_join(const std::filesystem::path& dir, const std::string& name, const JoinResult& r) {
  write_trajectory_file(dir / (name + "_position.csv"), r.trajectory.position, true);
  write_trajectory_file(dir / (name + "_orientation.csv"), r.trajectory.orientation, true);
  for (std::size_t l = 0; l < r.demos.positions.size(); ++l) {
    write_trajectory_file(dir / (name + "_demo" + std::to_string(l + 1) + "_position.csv"), r.demos.positions[l]);
    write_trajectory_file(dir / (name + "_demo" + std::to_string(l + 1) + "_orientation.csv"), r.demos.orientations[l]);
  }
  write_metrics(dir / (name + "_metrics.txt"), r.metrics, r.trajectory.switch_times);
}

}  // namespace detail

/// Writes <which>_*.csv and <which>_metrics.txt into `dir`; returns the metrics.
inline Metrics export_figure(const std::string& which, const std::filesystem::path& dir, std::uint64_t seed = 7) {
  std::filesystem::create_directories(dir);
  auto save = [&](const DmpModel& m) { save_model_file(dir / (which + "_model.dmp"), m); };
  if (which == "fig2") {
    const Fig2 r = fig2();
    write_trajectory_file(dir / "fig2_demo.csv", r.demo, true);
    write_trajectory_file(dir / "fig2_rollout.csv", r.rollout, true);
    save({r.model, "fig2", {}});
    detail::write_metrics(dir / "fig2_metrics.txt", r.metrics);
    return r.metrics;
  }
  if (which == "fig4") {
    const Fig4 r = fig4();
    write_trajectory_file(dir / "fig4_demo.csv", r.demo);
    write_trajectory_file(dir / "fig4_rollout.csv", r.rollout, true);
    save({r.model, "fig4", {}});
    detail::write_metrics(dir / "fig4_metrics.txt", r.metrics);
    return r.metrics;
  }
  if (which == "fig5") {
    const Fig5 r = fig5();
    write_trajectory_file(dir / "fig5_demo.csv", r.demo);
    write_trajectory_file(dir / "fig5_rollout.csv", r.rollout, true);
    save({r.model, "fig5", {}});
    detail::write_metrics(dir / "fig5_metrics.txt", r.metrics);
    return r.metrics;
  }
  if (which == "fig6") {
    const Fig6 r = fig6(seed);
    write_trajectory_file(dir / "fig6_demo.csv", r.demo);
    write_trajectory_file(dir / "fig6_rollout.csv", r.rollout, true);
    save({r.model, "fig6", {}});
    detail::write_metrics(dir / "fig6_metrics.txt", r.metrics);
    return r.metrics;
  }
  if (which == "fig7") {
    const Fig7 r = fig7();
    write_trajectory_file(dir / "fig7_demo.csv", r.demo);
    write_trajectory_file(dir / "fig7_rollout.csv", r.rollout, true);
    save({r.model, "fig7", {}});
    detail::write_metrics(dir / "fig7_metrics.txt", r.metrics);
    return r.metrics;
  }
  if (which == "fig8" || which == "fig9" || which == "fig10") {
    const JoinResult r = which == "fig8" ? fig8() : which == "fig9" ? fig9() : fig10();
    detail::write_join(dir, which, r);
    if (r.joined) {
      save({*r.joined->position, "fig10-position", {}});
      save_model_file(dir / "fig10_orientation_model.dmp", {*r.joined->orientation, "fig10-orientation", {}});
    }
    return r.metrics;
  }
  throw InvalidArgument("unknown figure '" + which + "'");
}

}  // namespace dmp::scenarios
