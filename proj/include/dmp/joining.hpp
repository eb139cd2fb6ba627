#pragma once

// Chaining discrete primitives into one motion. A segment is a pose: an
// optional position DMP and an optional quaternion DMP that run in lockstep.
//
//   join_velocity_threshold  run each segment until it is close to its goal (or slow), then hand over
//   join_target_crossing     run segment l for exactly T^l seconds, crossing its goal at a set velocity
//   join_overlay             merge the segments into one DMP with time-indexed kernels and a delayed goal

#include <cmath>
#include <optional>
#include <type_traits>
#include <vector>

#include "dmp/discrete.hpp"
#include "dmp/errors.hpp"
#include "dmp/geometric.hpp"

namespace dmp {

struct PoseDmp {
  std::optional<DiscreteDmp> position;
  std::optional<QuaternionDmp> orientation;

  /// Nominal duration tau T; position and orientation must agree.
  double duration() const {
    std::optional<double> t;
    if (position) t = position->gains.tau * nominal_duration(position->phase);
    if (orientation) {
      const double to = orientation->gains.tau * nominal_duration(orientation->phase);
      if (t && std::abs(*t - to) > 1e-9 * std::max(1.0, to)) {
        throw InvalidArgument("position and orientation durations differ");
      }
      t = to;
    }
    if (!t) throw InvalidArgument("pose segment has neither position nor orientation");
    return *t;
  }

  void validate() const {
    if (position) position->validate();
    if (orientation) orientation->validate();
    (void)duration();
  }
};

struct PoseState {
  std::optional<DiscreteState> position;
  std::optional<QuaternionState> orientation;
};

inline PoseState initial_state(const PoseDmp& dmp) {
  PoseState s;
  if (dmp.position) s.position = initial_state(*dmp.position);
  if (dmp.orientation) s.orientation = initial_state(*dmp.orientation);
  return s;
}

struct PoseTrajectory {
  Trajectory<VectorXd> position;           ///< empty when the segments carry no position part
  Trajectory<UnitQuaternion> orientation;  ///< empty when the segments carry no orientation part
  std::vector<double> switch_times;        ///< one per junction

  double duration() const { return position.empty() ? orientation.duration() : position.duration(); }
};

struct DmpSequence {
  std::vector<PoseDmp> segments;

  std::size_t size() const { return segments.size(); }

  void validate() const {
    if (segments.size() < 2) throw InvalidArgument("a sequence needs at least two segments");
    const PoseDmp& first = segments.front();
    for (const PoseDmp& s : segments) {
      s.validate();
      if (s.position.has_value() != first.position.has_value() ||
          s.orientation.has_value() != first.orientation.has_value()) {
        throw DimensionMismatch("segments carry different pose parts");
      }
      if (s.position && s.position->dofs() != first.position->dofs()) {
        throw DimensionMismatch("segments differ in position DoF count");
      }
    }
  }
};

enum class SwitchCriterion {
  Distance,  ///< distance to the segment goal
  Speed      ///< speed, checked once the segment has moved faster than the threshold
};

struct SwitchThresholds {
  SwitchCriterion criterion = SwitchCriterion::Distance;
  double position = 0.01;     ///< [m] or [m/s]
  double orientation = 0.01;  ///< [rad] or [rad/s]

  void validate() const {
    if (!(position > 0.0) || !(orientation > 0.0)) throw InvalidArgument("thresholds must be positive");
  }
};

struct JoinOptions {
  double dt = 0.01;
  Integrator integrator = Integrator::RungeKutta4;
  double horizon = 3.0;  ///< safety horizon, in multiples of tau per segment
};

/// Segment crossing velocities; empty entries fall back to the model's own value.
struct CrossingVelocity {
  VectorXd position;
  VectorXd orientation;
};

namespace detail {

template <class Point>
struct Recorder {
  Trajectory<Point> traj;
  std::vector<VectorXd> vel, acc;

  template <class Dmp, class State>
  void add(double t, const Dmp& dmp, const State& s) {
    auto [v, a] = rollout_rate(dmp, s, Coupling{});
    traj.times.push_back(t);
    traj.samples.push_back(rollout_point(s));
    traj.phase.push_back(s.phase.value);
    vel.push_back(std::move(v));
    acc.push_back(std::move(a));
  }

  Trajectory<Point> finish() {
    if (vel.empty()) return {};
    const auto rows = static_cast<Eigen::Index>(vel.size());
    traj.velocity.resize(rows, vel.front().size());
    traj.acceleration.resize(rows, vel.front().size());
    for (Eigen::Index i = 0; i < rows; ++i) {
      traj.velocity.row(i) = vel[static_cast<std::size_t>(i)].transpose();
      traj.acceleration.row(i) = acc[static_cast<std::size_t>(i)].transpose();
    }
    return std::move(traj);
  }
};

struct PoseRecorder {
  Recorder<VectorXd> position;
  Recorder<UnitQuaternion> orientation;

  void add(double t, const PoseDmp& dmp, const PoseState& s) {
    if (dmp.position) position.add(t, *dmp.position, *s.position);
    if (dmp.orientation) orientation.add(t, *dmp.orientation, *s.orientation);
  }
};

// The segment as it is run from a live state: its start is moved to that state.
inline PoseDmp rebased(const PoseDmp& seg, const PoseState& s) {
  PoseDmp out = seg;
  if (out.position && s.position) out.position->y0 = s.position->y;
  if (out.orientation && s.orientation) out.orientation->q0 = s.orientation->q;
  return out;
}

// Fresh phase and goal of `next`, keeping pose and velocity of `prev`.
inline PoseState handoff(const PoseDmp& next, const PoseState& prev) {
  PoseState n = initial_state(next);
  if (next.position) {
    n.position->y = prev.position->y;
    n.position->z = prev.position->z * (next.position->gains.tau / prev.position->phase.tau);
  }
  if (next.orientation) {
    n.orientation->q = prev.orientation->q;
    n.orientation->eta = prev.orientation->eta * (next.orientation->gains.tau / prev.orientation->phase.tau);
  }
  return n;
}

inline PoseState pose_step(const PoseDmp& dmp, const PoseState& s, double dt, Integrator integrator) {
  PoseState n;
  if (dmp.position) n.position = step(*dmp.position, *s.position, dt, Coupling{}, integrator);
  if (dmp.orientation) n.orientation = step(*dmp.orientation, *s.orientation, dt, Coupling{}, integrator);
  return n;
}

inline double pose_tau(const PoseDmp& dmp) {
  return dmp.position ? dmp.position->gains.tau : dmp.orientation->gains.tau;
}

struct SwitchMonitor {
  SwitchThresholds th;
  bool armed = false;

  bool reached(const PoseDmp& dmp, const PoseState& s) {
    bool pos_ok = true, ori_ok = true;
    if (th.criterion == SwitchCriterion::Distance) {
      if (dmp.position) pos_ok = (dmp.position->goal - s.position->y).norm() < th.position;
      if (dmp.orientation) ori_ok = quat_distance(dmp.orientation->goal, s.orientation->q) < th.orientation;
      return pos_ok && ori_ok;
    }
    if (dmp.position) {
      const double v = s.position->z.norm() / dmp.position->gains.tau;
      armed = armed || v >= th.position;
      pos_ok = v < th.position;
    }
    if (dmp.orientation) {
      const double w = s.orientation->eta.norm() / dmp.orientation->gains.tau;
      armed = armed || w >= th.orientation;
      ori_ok = w < th.orientation;
    }
    return armed && pos_ok && ori_ok;
  }
};

inline void check_join_options(const JoinOptions& o) {
  if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw InvalidStep("dt must be positive");
  if (!(o.horizon > 0.0)) throw InvalidArgument("safety horizon must be positive");
}

inline PoseTrajectory finish(PoseRecorder& rec, std::vector<double> switches) {
  PoseTrajectory out;
  out.position = rec.position.finish();
  out.orientation = rec.orientation.finish();
  out.switch_times = std::move(switches);
  return out;
}

}  // namespace detail

/// Runs each segment until the switch criterion holds, then starts the next
/// segment from the live pose and velocity. The last segment ends the same way.
inline PoseTrajectory join_velocity_threshold(const DmpSequence& seq, const SwitchThresholds& thresholds = {},
                                              const JoinOptions& o = {}) {
  seq.validate();
  thresholds.validate();
  detail::check_join_options(o);

  detail::PoseRecorder rec;
  std::vector<double> switches;
  PoseState state = initial_state(seq.segments.front());
  double base = 0.0;
  for (std::size_t l = 0; l < seq.size(); ++l) {
    const PoseDmp seg = detail::rebased(seq.segments[l], state);
    if (l > 0) state = detail::handoff(seg, state);
    const auto limit = static_cast<std::size_t>(std::ceil(o.horizon * detail::pose_tau(seg) / o.dt));
    detail::SwitchMonitor monitor{thresholds};
    std::size_t k = 0;
    if (l == 0) rec.add(0.0, seg, state);
    while (!monitor.reached(seg, state)) {
      if (k >= limit) throw NoSwitch("segment " + std::to_string(l) + " never met the switch threshold");
      state = detail::pose_step(seg, state, o.dt, o.integrator);
      ++k;
      rec.add(base + static_cast<double>(k) * o.dt, seg, state);
    }
    base += static_cast<double>(k) * o.dt;
    if (l + 1 < seq.size()) switches.push_back(base);
  }
  return detail::finish(rec, std::move(switches));
}

/// Runs segment l for exactly T^l seconds with the target-crossing dynamics.
/// `velocities` holds one entry per junction, optionally followed by one for the final goal.
inline PoseTrajectory join_target_crossing(const DmpSequence& seq, const std::vector<CrossingVelocity>& velocities = {},
                                           const JoinOptions& o = {}) {
  seq.validate();
  detail::check_join_options(o);
  if (!velocities.empty() && velocities.size() != seq.size() - 1 && velocities.size() != seq.size()) {
    throw DimensionMismatch("need one crossing velocity per junction");
  }
  std::vector<PoseDmp> segs = seq.segments;
  for (std::size_t l = 0; l < segs.size(); ++l) {
    PoseDmp& s = segs[l];
    if ((s.position && s.position->variant != Variant::TargetCrossing) ||
        (s.orientation && s.orientation->variant != Variant::TargetCrossing)) {
      throw InvalidArgument("target-crossing joining needs target-crossing segments");
    }
    if (l >= velocities.size()) continue;
    const CrossingVelocity& v = velocities[l];
    if (s.position && v.position.size()) {
      if (v.position.size() != s.position->dofs()) throw DimensionMismatch("crossing velocity dimension");
      s.position->crossing_velocity = v.position;
    }
    if (s.orientation && v.orientation.size()) {
      if (v.orientation.size() != 3) throw DimensionMismatch("angular crossing velocity needs 3 entries");
      s.orientation->crossing_velocity = v.orientation;
    }
    if ((v.position.size() && !v.position.allFinite()) || (v.orientation.size() && !v.orientation.allFinite())) {
      throw InvalidArgument("crossing velocity must be finite");
    }
    s.validate();
  }

  detail::PoseRecorder rec;
  std::vector<double> switches;
  PoseState state = initial_state(segs.front());
  double base = 0.0;
  for (std::size_t l = 0; l < segs.size(); ++l) {
    const PoseDmp seg = detail::rebased(segs[l], state);
    if (l > 0) state = detail::handoff(seg, state);
    const auto n = static_cast<std::size_t>(std::llround(seg.duration() / o.dt));
    if (l == 0) rec.add(0.0, seg, state);
    for (std::size_t k = 1; k <= n; ++k) {
      state = detail::pose_step(seg, state, o.dt, o.integrator);
      rec.add(base + static_cast<double>(k) * o.dt, seg, state);
    }
    base += static_cast<double>(n) * o.dt;
    if (l + 1 < segs.size()) switches.push_back(base);
  }
  return detail::finish(rec, std::move(switches));
}

namespace detail {

inline const VectorXd& start_of(const DiscreteDmp& d) { return d.y0; }
inline const UnitQuaternion& start_of(const QuaternionDmp& d) { return d.q0; }

template <class Dmp>
Dmp overlay_part(const std::vector<const Dmp*>& parts) {
  const Dmp& first = *parts.front();
  std::vector<double> durations;
  double total = 0.0;
  for (const Dmp* p : parts) {
    if (p->forcing.layout.kind != KernelKind::GaussianTime) {
      throw LayoutMismatch("overlay joining needs time-indexed Gaussian kernels in every segment");
    }
    if (!std::holds_alternative<SigmoidalPhase>(p->phase)) throw InvalidArgument("overlay joining needs sigmoidal phases");
    if (p->variant != Variant::Classical) throw InvalidArgument("overlay joining needs classical segments");
    if (!p->delayed_goal) throw InvalidArgument("overlay segments must be trained with a delayed goal");
    if (p->gains.alpha_z != first.gains.alpha_z || p->gains.beta_z != first.gains.beta_z ||
        std::abs(p->gains.tau - first.gains.tau) > 1e-12 * first.gains.tau) {
      throw InvalidArgument("overlay segments must share gains and time scale");
    }
    if (p->forcing.weights.cols() != first.forcing.weights.cols()) throw DimensionMismatch("segment DoF counts differ");
    durations.push_back(p->gains.tau * nominal_duration(p->phase));
    total += durations.back();
  }

  Dmp out = first;
  const double tau = first.gains.tau;
  auto sig = std::get<SigmoidalPhase>(first.phase);
  sig.T = total / tau;
  out.phase = sig;

  Eigen::Index rows = 0;
  for (const Dmp* p : parts) rows += p->forcing.layout.size();
  KernelLayout layout{KernelKind::GaussianTime, VectorXd(rows), VectorXd(rows)};
  MatrixXd weights(rows, first.forcing.weights.cols());
  Eigen::Index at = 0;
  double offset = 0.0;
  DelayedGoal<typename std::decay_t<decltype(start_of(first))>> dg{start_of(first), {}, {}};
  for (std::size_t l = 0; l < parts.size(); ++l) {
    const ForcingModel& f = parts[l]->forcing;
    const Eigen::Index n = f.layout.size();
    layout.centers.segment(at, n) = (f.layout.centers.array() * durations[l] + offset) / total;
    layout.widths.segment(at, n) = f.layout.widths * (durations[l] / total);
    weights.middleRows(at, n) = f.weights;
    at += n;
    offset += durations[l];
    dg.goals.push_back(parts[l]->goal);
    dg.durations.push_back(durations[l]);
  }
  out.forcing = ForcingModel{std::move(layout), std::move(weights), 1.0};
  out.goal = parts.back()->goal;
  out.delayed_goal = std::move(dg);
  out.validate();
  return out;
}

}  // namespace detail

/// Merges the sequence into one pose DMP with N^1 + ... + N^L kernels.
inline PoseDmp join_overlay(const DmpSequence& seq) {
  seq.validate();
  PoseDmp out;
  if (seq.segments.front().position) {
    std::vector<const DiscreteDmp*> parts;
    for (const PoseDmp& s : seq.segments) parts.push_back(&*s.position);
    out.position = detail::overlay_part(parts);
  }
  if (seq.segments.front().orientation) {
    std::vector<const QuaternionDmp*> parts;
    for (const PoseDmp& s : seq.segments) parts.push_back(&*s.orientation);
    out.orientation = detail::overlay_part(parts);
  }
  return out;
}

struct PoseRolloutOptions {
  double dt = 0.01;
  std::optional<double> duration;  ///< otherwise until the phase falls to `phase_threshold`
  double phase_threshold = 1e-3;
  Integrator integrator = Integrator::RungeKutta4;
};

/// Rolls out both parts of a pose DMP on a common time grid.
inline PoseTrajectory rollout(const PoseDmp& dmp, const PoseRolloutOptions& o = {}) {
  dmp.validate();
  PoseTrajectory out;
  if (dmp.position) {
    RolloutOptions ro;
    ro.dt = o.dt;
    ro.duration = o.duration;
    ro.phase_threshold = o.phase_threshold;
    ro.integrator = o.integrator;
    out.position = rollout(*dmp.position, ro);
  }
  if (dmp.orientation) {
    QuaternionRolloutOptions ro;
    ro.dt = o.dt;
    ro.duration = o.duration;
    ro.phase_threshold = o.phase_threshold;
    ro.integrator = o.integrator;
    out.orientation = rollout(*dmp.orientation, ro);
  }
  return out;
}

}  // namespace dmp
