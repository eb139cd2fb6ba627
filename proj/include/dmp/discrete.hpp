#pragma once

// Point-to-point DMP in R^J:
//   tau zdot = alpha_z (beta_z (g - y) - z) + f(x)      (Classical)
//   tau ydot = z
// plus the scale-invariant, Pastor and target-crossing transformation systems.

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dmp/basis.hpp"
#include "dmp/errors.hpp"
#include "dmp/learning.hpp"
#include "dmp/phase.hpp"
#include "dmp/targets.hpp"
#include "dmp/trajectory.hpp"

namespace dmp {

enum class Variant {
  Classical,
  ScaleInvariant,  ///< forcing scaled by (g - y0)
  Pastor,          ///< forcing inside the spring term, minus (g - y0) x
  TargetCrossing,  ///< (1 - x) prefactor and a moving target
};

enum class Integrator { SemiImplicitEuler, RungeKutta4 };

struct Gains {
  double alpha_z = 25.0;
  double beta_z = 6.25;
  double tau = 1.0;

  void validate() const {
    if (!(alpha_z > 0.0) || !(beta_z > 0.0) || !(tau > 0.0) || !std::isfinite(alpha_z) || !std::isfinite(beta_z) ||
        !std::isfinite(tau)) {
      throw InvalidArgument("gains must be positive and finite");
    }
  }

  bool operator==(const Gains&) const = default;
};

/// Additive modulation of a single step. A default-constructed value is neutral.
struct Coupling {
  VectorXd acceleration;  ///< added to tau zdot
  VectorXd velocity;      ///< added to tau ydot
  VectorXd goal_offset;   ///< added to the goal
  double speed = 1.0;     ///< upsilon; dynamics and phase run 1/upsilon times as fast
  std::optional<StopFeedback> stop;
};

/// Kernel-weighted blend of intermediate goals over the phase.
struct ViaGoalSchedule {
  std::vector<VectorXd> goals;
  VectorXd centers;  ///< phase values
  VectorXd widths;   ///< h_v

  void validate() const {
    const auto v = static_cast<Eigen::Index>(goals.size());
    if (v < 1) throw InvalidArgument("via schedule needs at least one goal");
    if (centers.size() != v || widths.size() != v) throw DimensionMismatch("via schedule sizes differ");
    if ((widths.array() <= 0.0).any()) throw InvalidArgument("via widths must be positive");
    for (const auto& g : goals) {
      if (g.size() != goals.front().size()) throw DimensionMismatch("via goals differ in dimension");
    }
  }

  bool operator==(const ViaGoalSchedule&) const = default;
};

inline VectorXd via_goal(const ViaGoalSchedule& schedule, double phase_value) {
  schedule.validate();
  VectorXd psi(schedule.centers.size());
  for (Eigen::Index v = 0; v < psi.size(); ++v) {
    const double d = phase_value - schedule.centers[v];
    psi[v] = std::exp(-schedule.widths[v] * d * d);
  }
  const double sum = psi.sum();
  if (!(sum > 1e-300)) {
    Eigen::Index nearest = 0;
    (schedule.centers.array() - phase_value).abs().minCoeff(&nearest);
    return schedule.goals[nearest];
  }
  VectorXd g = VectorXd::Zero(schedule.goals.front().size());
  for (Eigen::Index v = 0; v < psi.size(); ++v) g += psi[v] * schedule.goals[v];
  return g / sum;
}

struct DiscreteDmp {
  Gains gains;
  PhaseConfig phase = ExponentialPhase{};
  Variant variant = Variant::Classical;
  VectorXd y0;
  VectorXd goal;
  ForcingModel forcing;
  std::optional<DelayedGoal<VectorXd>> delayed_goal;  ///< replaces the fixed goal when set
  std::optional<ViaGoalSchedule> via;                 ///< replaces the fixed goal when set
  VectorXd crossing_velocity;                         ///< TargetCrossing rate; empty means zero

  Eigen::Index dofs() const { return y0.size(); }

  void validate() const {
    gains.validate();
    forcing.validate();
    if (y0.size() < 1 || goal.size() != y0.size() || forcing.dofs() != y0.size()) {
      throw DimensionMismatch("start, goal and forcing disagree on the DoF count");
    }
    if (!y0.allFinite() || !goal.allFinite()) throw InvalidArgument("non-finite start or goal");
    if (is_periodic(phase)) throw InvalidArgument("discrete DMPs need a decaying phase");
    if (crossing_velocity.size() != 0 && crossing_velocity.size() != y0.size()) {
      throw DimensionMismatch("crossing velocity has the wrong dimension");
    }
    if (variant == Variant::TargetCrossing && !std::holds_alternative<ExponentialPhase>(phase)) {
      throw InvalidArgument("target crossing needs an exponential phase");
    }
    if (delayed_goal) delayed_goal->validate();
    if (via) via->validate();
  }

  bool operator==(const DiscreteDmp&) const = default;
};

struct DiscreteState {
  VectorXd y;
  VectorXd z;     ///< tau ydot
  VectorXd goal;  ///< current goal, moved by goal switching
  CanonicalState phase;
};

inline DiscreteState initial_state(const DiscreteDmp& dmp) {
  dmp.validate();
  return {dmp.y0, VectorXd::Zero(dmp.dofs()), dmp.goal, make_phase(dmp.phase, dmp.gains.tau)};
}

namespace detail {

struct DiscreteRate {
  VectorXd ydot;  ///< dy/dt
  VectorXd zdot;  ///< dz/dt
};

inline void check_coupling(const Coupling& c, Eigen::Index j) {
  auto ok = [j](const VectorXd& v) { return v.size() == 0 || v.size() == j; };
  if (!ok(c.acceleration) || !ok(c.velocity) || !ok(c.goal_offset)) throw DimensionMismatch("coupling dimension");
  if (!(c.speed > 0.0) || !std::isfinite(c.speed)) throw InvalidArgument("speed factor must be positive");
}

inline VectorXd goal_at(const DiscreteDmp& dmp, const VectorXd& goal, const CanonicalState& phase) {
  if (dmp.via) return via_goal(*dmp.via, phase.value);
  if (dmp.delayed_goal) return dmp.delayed_goal->at(phase.clock);
  return goal;
}

/// tau zdot before coupling.
inline VectorXd transformation_accel(const DiscreteDmp& dmp, const VectorXd& y, const VectorXd& z,
                                     const VectorXd& g, const CanonicalState& phase) {
  const Gains& k = dmp.gains;
  const double x = phase.value;
  const VectorXd f = eval_forcing(dmp.forcing, x, elapsed_fraction(phase));
  switch (dmp.variant) {
    case Variant::Classical:
      return k.alpha_z * (k.beta_z * (g - y) - z) + f;
    case Variant::ScaleInvariant:
      return k.alpha_z * (k.beta_z * (g - y) - z) + (g - dmp.y0).cwiseProduct(f);
    case Variant::Pastor:
      return k.alpha_z * (k.beta_z * (g - y - (g - dmp.y0) * x + f) - z);
    case Variant::TargetCrossing: {
      const VectorXd rate = dmp.crossing_velocity.size() ? dmp.crossing_velocity : VectorXd::Zero(y.size());
      const MovingTarget<VectorXd> target{g, rate, k.tau * nominal_duration(dmp.phase)};
      const VectorXd moving = target.at(phase.clock);
      return (1.0 - x) * (k.alpha_z * (k.beta_z * (moving - y) + k.tau * rate - z) + f);
    }
  }
  return {};
}

inline DiscreteRate discrete_rate(const DiscreteDmp& dmp, const VectorXd& y, const VectorXd& z,
                                  const VectorXd& goal, const CanonicalState& phase, const Coupling& c) {
  VectorXd g = goal_at(dmp, goal, phase);
  if (c.goal_offset.size()) g += c.goal_offset;
  VectorXd acc = transformation_accel(dmp, y, z, g, phase);
  if (c.acceleration.size()) acc += c.acceleration;
  VectorXd vel = z;
  if (c.velocity.size()) vel += c.velocity;
  const double scale = 1.0 / (dmp.gains.tau * c.speed);
  return {vel * scale, acc * scale};
}

}  // namespace detail

/// One integration step of length dt.
inline DiscreteState step(const DiscreteDmp& dmp, const DiscreteState& s, double dt, const Coupling& c = {},
                          Integrator integrator = Integrator::SemiImplicitEuler) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidStep("dt must be positive");
  detail::check_coupling(c, dmp.dofs());
  const double rate = 1.0 / c.speed;
  DiscreteState n = s;
  if (integrator == Integrator::SemiImplicitEuler) {
    const auto d = detail::discrete_rate(dmp, s.y, s.z, s.goal, s.phase, c);
    n.z = s.z + dt * d.zdot;
    VectorXd vel = n.z;
    if (c.velocity.size()) vel += c.velocity;
    n.y = s.y + dt * vel / (dmp.gains.tau * c.speed);
  } else {
    const CanonicalState mid = step_phase(s.phase, 0.5 * dt, c.stop, rate);
    const CanonicalState end = step_phase(s.phase, dt, c.stop, rate);
    const auto k1 = detail::discrete_rate(dmp, s.y, s.z, s.goal, s.phase, c);
    const auto k2 = detail::discrete_rate(dmp, s.y + 0.5 * dt * k1.ydot, s.z + 0.5 * dt * k1.zdot, s.goal, mid, c);
    const auto k3 = detail::discrete_rate(dmp, s.y + 0.5 * dt * k2.ydot, s.z + 0.5 * dt * k2.zdot, s.goal, mid, c);
    const auto k4 = detail::discrete_rate(dmp, s.y + dt * k3.ydot, s.z + dt * k3.zdot, s.goal, end, c);
    n.y = s.y + dt / 6.0 * (k1.ydot + 2.0 * k2.ydot + 2.0 * k3.ydot + k4.ydot);
    n.z = s.z + dt / 6.0 * (k1.zdot + 2.0 * k2.zdot + 2.0 * k3.zdot + k4.zdot);
  }
  n.phase = step_phase(s.phase, dt, c.stop, rate);
  if (!n.y.allFinite() || !n.z.allFinite()) throw StepTooLarge("integration diverged");
  return n;
}

/// tau gdot = alpha_g (g_new - g), integrated exactly over dt.
inline DiscreteState goal_switch_step(const DiscreteState& s, const VectorXd& g_new, double alpha_g, double dt) {
  if (!(alpha_g > 0.0)) throw InvalidArgument("alpha_g must be positive");
  if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
  if (g_new.size() != s.goal.size()) throw DimensionMismatch("new goal has the wrong dimension");
  DiscreteState n = s;
  n.goal = g_new + (s.goal - g_new) * std::exp(-alpha_g * dt / s.phase.tau);
  return n;
}

template <class Point>
struct GoalSwitch {
  double time = 0.0;
  Point goal;
  double alpha_g = 10.0;
};

template <class State, class Point>
struct BasicRolloutOptions {
  double dt = 0.01;
  std::optional<double> duration;  ///< otherwise run until the phase falls to `phase_threshold`
  double phase_threshold = 1e-3;
  Integrator integrator = Integrator::SemiImplicitEuler;
  std::optional<GoalSwitch<Point>> goal_switch;
  /// Called once per step with the time and state at the start of the step.
  std::function<Coupling(double, const State&)> coupling;
  std::size_t max_steps = 10'000'000;
};

using RolloutOptions = BasicRolloutOptions<DiscreteState, VectorXd>;

/// Per-sample velocity/acceleration and point, as recorded by the rollout loop.
inline std::pair<VectorXd, VectorXd> rollout_rate(const DiscreteDmp& dmp, const DiscreteState& s, const Coupling& c) {
  auto d = detail::discrete_rate(dmp, s.y, s.z, s.goal, s.phase, c);
  return {std::move(d.ydot), d.zdot / (dmp.gains.tau * c.speed)};
}

inline const VectorXd& rollout_point(const DiscreteState& s) { return s.y; }

namespace detail {

inline std::size_t step_count(double dt, const std::optional<double>& duration, std::size_t max_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidStep("dt must be positive");
  if (!duration) return max_steps;
  if (!(*duration >= 0.0)) throw InvalidArgument("duration must be >= 0");
  return static_cast<std::size_t>(std::ceil(*duration / dt - 1e-9));
}

/// Shared rollout loop. Needs step, goal_switch_step, rollout_rate and rollout_point for the formulation.
template <class Dmp, class State, class Point>
Trajectory<Point> rollout_loop(const Dmp& dmp, State state, const BasicRolloutOptions<State, Point>& o, double t0) {
  dmp.validate();
  const std::size_t n = step_count(o.dt, o.duration, o.max_steps);
  Trajectory<Point> traj;
  std::vector<VectorXd> vel, acc;
  Coupling c;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * o.dt;
    const bool last = k == n || (!o.duration && phase_done(state.phase, o.phase_threshold));
    if (!last && o.coupling) c = o.coupling(t0 + t, state);
    auto [v, a] = rollout_rate(dmp, state, c);
    traj.times.push_back(t0 + t);
    traj.samples.push_back(rollout_point(state));
    traj.phase.push_back(state.phase.value);
    vel.push_back(std::move(v));
    acc.push_back(std::move(a));
    if (last) break;
    if (k >= o.max_steps) throw NoSwitch("rollout exceeded the step limit");
    state = step(dmp, state, o.dt, c, o.integrator);
    if (o.goal_switch && t + o.dt > o.goal_switch->time + 1e-12) {
      state = goal_switch_step(state, o.goal_switch->goal, o.goal_switch->alpha_g, o.dt);
    }
  }
  const auto rows = static_cast<Eigen::Index>(vel.size());
  traj.velocity.resize(rows, vel.front().size());
  traj.acceleration.resize(rows, vel.front().size());
  for (Eigen::Index i = 0; i < rows; ++i) {
    traj.velocity.row(i) = vel[static_cast<std::size_t>(i)].transpose();
    traj.acceleration.row(i) = acc[static_cast<std::size_t>(i)].transpose();
  }
  return traj;
}

}  // namespace detail

/// Integrates from `state`, recording y, ydot, yddot and phase at every sample.
/// Times are reported relative to `t0`.
inline Trajectory<VectorXd> rollout_from(const DiscreteDmp& dmp, const DiscreteState& state, const RolloutOptions& o,
                                         double t0 = 0.0) {
  return detail::rollout_loop(dmp, state, o, t0);
}

inline Trajectory<VectorXd> rollout(const DiscreteDmp& dmp, const RolloutOptions& o = {}) {
  return rollout_from(dmp, initial_state(dmp), o);
}

// ---------------------------------------------------------------------------
// Learning from a demonstration
// ---------------------------------------------------------------------------

struct TrainOptions {
  int kernels = 20;
  Variant variant = Variant::Classical;
  PhaseConfig phase = ExponentialPhase{};
  std::optional<KernelKind> kernel_kind;  ///< GaussianPhase for exponential phases, GaussianTime otherwise
  double alpha_z = 25.0;
  double beta_z = 6.25;
  bool delayed_goal = false;                 ///< ramp the goal from y0 to g over the demo
  std::optional<VectorXd> crossing_velocity;  ///< TargetCrossing; defaults to the final demo velocity
  std::optional<double> ridge;
  /// Fixes tau instead of using the demo duration; the phase then runs for T = duration / tau.
  /// Sigmoidal and piecewise-linear phases only.
  std::optional<double> time_scale;
};

namespace detail {

inline void apply_timing(Gains& gains, PhaseConfig& phase, const TrainOptions& o, double duration) {
  gains = {o.alpha_z, o.beta_z, duration};
  phase = o.phase;
  if (!o.time_scale) return;
  if (!(*o.time_scale > 0.0) || !std::isfinite(*o.time_scale)) throw InvalidArgument("time scale must be positive");
  gains.tau = *o.time_scale;
  if (auto* s = std::get_if<SigmoidalPhase>(&phase)) {
    s->T = duration / gains.tau;
  } else if (auto* p = std::get_if<PiecewiseLinearPhase>(&phase)) {
    p->T = duration / gains.tau;
  } else {
    throw InvalidArgument("a fixed time scale needs a sigmoidal or piecewise-linear phase");
  }
}

inline double alpha_x_of(const PhaseConfig& p) {
  if (const auto* e = std::get_if<ExponentialPhase>(&p)) return e->alpha_x;
  return std::log(1000.0);
}

inline VectorXd demo_phases(const PhaseConfig& config, double tau, const std::vector<double>& times) {
  VectorXd x(static_cast<Eigen::Index>(times.size()));
  for (std::size_t j = 0; j < times.size(); ++j) {
    x[static_cast<Eigen::Index>(j)] = phase_value_at(config, tau, times[j] - times.front());
  }
  return x;
}

inline VectorXd demo_fractions(const PhaseConfig& config, double tau, const std::vector<double>& times) {
  VectorXd s(static_cast<Eigen::Index>(times.size()));
  for (std::size_t j = 0; j < times.size(); ++j) {
    s[static_cast<Eigen::Index>(j)] = (times[j] - times.front()) / (tau * nominal_duration(config));
  }
  return s;
}

inline KernelLayout training_layout(const TrainOptions& o) {
  if (is_periodic(o.phase)) throw InvalidArgument("discrete DMPs need a decaying phase");
  const KernelKind kind = o.kernel_kind.value_or(std::holds_alternative<ExponentialPhase>(o.phase)
                                                     ? KernelKind::GaussianPhase
                                                     : KernelKind::GaussianTime);
  if (kind == KernelKind::VonMises) throw InvalidArgument("discrete DMPs cannot use periodic kernels");
  return default_layout(kind, o.kernels, alpha_x_of(o.phase));
}

// Least-squares weights for forcing targets sampled at the demo times. Crossing
// rows are weighted by (1 - x) so the fit matches the actual acceleration equation.
inline ForcingModel fit_forcing(const KernelLayout& layout, const PhaseConfig& phase, double tau,
                                const std::vector<double>& times, const MatrixXd& targets, const TrainOptions& o) {
  FitOptions fit;
  fit.ridge = o.ridge;
  const VectorXd x = demo_phases(phase, tau, times);
  if (layout.kind == KernelKind::GaussianTime) fit.elapsed_fracs = demo_fractions(phase, tau, times);
  if (o.variant == Variant::TargetCrossing) fit.row_weights = (1.0 - x.array()).matrix();
  return batch_fit(layout, x, targets, fit).model;
}

/// Phase state matching demo sample time t (relative to the first sample).
inline CanonicalState phase_at(const PhaseConfig& config, double tau, double t) {
  CanonicalState ph = make_phase(config, tau);
  ph.clock = t;
  ph.elapsed = t;
  ph.value = phase_value_at(config, tau, t);
  return ph;
}

}  // namespace detail

/// Forcing values that make `skeleton` (gains, start, goal, variant; weights
/// ignored) reproduce the demonstration. Rows follow the demo samples. For
/// TargetCrossing the values are divided by (1 - x) and set to 0 where x = 1.
inline MatrixXd forcing_target(const DiscreteDmp& skeleton, const Demonstration<VectorXd>& demo_in) {
  const Demonstration<VectorXd> demo = with_derivatives(demo_in);
  const Gains& k = skeleton.gains;
  const Eigen::Index j = skeleton.y0.size();
  const auto n = static_cast<Eigen::Index>(demo.size());
  if (demo.velocity.cols() != j) throw DimensionMismatch("demo and model disagree on the DoF count");
  const VectorXd x = detail::demo_phases(skeleton.phase, k.tau, demo.times);
  const double tau2 = k.tau * k.tau;
  const VectorXd span = skeleton.goal - skeleton.y0;
  if (skeleton.variant == Variant::ScaleInvariant && (span.array().abs() < 1e-9).any()) {
    throw DegenerateDemo("scale-invariant variant needs g != y0 in every DoF");
  }
  MatrixXd f(n, j);
  for (Eigen::Index t = 0; t < n; ++t) {
    const VectorXd& y = demo.samples[static_cast<std::size_t>(t)];
    const VectorXd yd = demo.velocity.row(t).transpose();
    const VectorXd ydd = demo.acceleration.row(t).transpose();
    const CanonicalState ph =
        detail::phase_at(skeleton.phase, k.tau, demo.times[static_cast<std::size_t>(t)] - demo.times.front());
    const VectorXd g = detail::goal_at(skeleton, skeleton.goal, ph);
    VectorXd row;
    switch (skeleton.variant) {
      case Variant::Classical:
        row = tau2 * ydd - k.alpha_z * (k.beta_z * (g - y) - k.tau * yd);
        break;
      case Variant::ScaleInvariant:
        row = (tau2 * ydd - k.alpha_z * (k.beta_z * (g - y) - k.tau * yd)).cwiseQuotient(g - skeleton.y0);
        break;
      case Variant::Pastor:
        row = (tau2 * ydd + k.alpha_z * k.tau * yd) / (k.alpha_z * k.beta_z) - (g - y) + (g - skeleton.y0) * x[t];
        break;
      case Variant::TargetCrossing: {
        const double w = 1.0 - x[t];
        const VectorXd rate =
            skeleton.crossing_velocity.size() ? skeleton.crossing_velocity : VectorXd::Zero(j);
        const MovingTarget<VectorXd> target{g, rate, k.tau * nominal_duration(skeleton.phase)};
        const VectorXd bracket = k.alpha_z * (k.beta_z * (target.at(ph.clock) - y) + k.tau * (rate - yd));
        row = w < 1e-12 ? VectorXd::Zero(j) : VectorXd(tau2 * ydd / w - bracket);
        break;
      }
    }
    f.row(t) = row.transpose();
  }
  return f;
}

/// Fits a discrete DMP to a demonstration: tau = duration, y0 = first sample, g = last sample.
inline DiscreteDmp train_discrete(const Demonstration<VectorXd>& demo_in, const TrainOptions& o = {}) {
  const Demonstration<VectorXd> demo = with_derivatives(demo_in);
  DiscreteDmp dmp;
  detail::apply_timing(dmp.gains, dmp.phase, o, demo.duration());
  dmp.variant = o.variant;
  dmp.y0 = demo.samples.front();
  dmp.goal = demo.samples.back();
  dmp.forcing = ForcingModel::zeros(detail::training_layout(o), dmp.y0.size());
  if (o.delayed_goal) {
    dmp.delayed_goal = DelayedGoal<VectorXd>{dmp.y0, {dmp.goal}, {dmp.gains.tau * nominal_duration(dmp.phase)}};
  }
  if (o.variant == Variant::TargetCrossing) {
    dmp.crossing_velocity = o.crossing_velocity.value_or(VectorXd(demo.velocity.bottomRows(1).transpose()));
  }
  dmp.validate();
  dmp.forcing =
      detail::fit_forcing(dmp.forcing.layout, dmp.phase, dmp.gains.tau, demo.times, forcing_target(dmp, demo), o);
  return dmp;
}

}  // namespace dmp
