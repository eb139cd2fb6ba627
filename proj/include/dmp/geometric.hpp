#pragma once

// Discrete DMPs on S3, SO(3) and the SPD cone. Errors to the goal are taken
// through the Log maps, states advance through the Exp maps, so unit norm,
// orthogonality and positive definiteness hold by construction.

#include <cmath>
#include <optional>
#include <utility>

#include "dmp/basis.hpp"
#include "dmp/discrete.hpp"
#include "dmp/errors.hpp"
#include "dmp/manifold.hpp"
#include "dmp/phase.hpp"
#include "dmp/targets.hpp"
#include "dmp/trajectory.hpp"

namespace dmp {

// ---------------------------------------------------------------------------
// Model and state types
// ---------------------------------------------------------------------------

struct QuaternionDmp {
  Gains gains;
  PhaseConfig phase = ExponentialPhase{};
  Variant variant = Variant::Classical;  ///< Classical or TargetCrossing
  UnitQuaternion q0;
  UnitQuaternion goal;
  ForcingModel forcing;
  std::optional<DelayedGoal<UnitQuaternion>> delayed_goal;
  VectorXd crossing_velocity;  ///< angular rate at the goal (TargetCrossing); empty means zero

  void validate() const {
    gains.validate();
    forcing.validate();
    if (forcing.dofs() != 3) throw DimensionMismatch("orientation forcing needs 3 DoFs");
    if (is_periodic(phase)) throw InvalidArgument("orientation DMPs need a decaying phase");
    if (variant != Variant::Classical && variant != Variant::TargetCrossing) {
      throw InvalidArgument("orientation DMPs support the classical and target-crossing forms");
    }
    if (variant == Variant::TargetCrossing && !std::holds_alternative<ExponentialPhase>(phase)) {
      throw InvalidArgument("target crossing needs an exponential phase");
    }
    if (crossing_velocity.size() != 0 && crossing_velocity.size() != 3) {
      throw DimensionMismatch("crossing velocity must have 3 entries");
    }
    if (delayed_goal) delayed_goal->validate();
  }

  bool operator==(const QuaternionDmp&) const = default;
};

struct QuaternionState {
  UnitQuaternion q;
  Vec3 eta = Vec3::Zero();  ///< tau omega
  UnitQuaternion goal;
  CanonicalState phase;
};

struct RotationDmp {
  Gains gains;
  PhaseConfig phase = ExponentialPhase{};
  Rotation3 r0;
  Rotation3 goal;
  ForcingModel forcing;

  void validate() const {
    gains.validate();
    forcing.validate();
    if (forcing.dofs() != 3) throw DimensionMismatch("orientation forcing needs 3 DoFs");
    if (is_periodic(phase)) throw InvalidArgument("orientation DMPs need a decaying phase");
  }

  bool operator==(const RotationDmp&) const = default;
};

struct RotationState {
  Rotation3 r;
  Vec3 eta = Vec3::Zero();
  Rotation3 goal;
  CanonicalState phase;
};

struct SpdDmp {
  Gains gains;
  PhaseConfig phase = ExponentialPhase{};
  SpdMatrix x1;  ///< start, and the base of every tangent quantity
  SpdMatrix goal;
  ForcingModel forcing;

  void validate() const {
    gains.validate();
    forcing.validate();
    if (goal.dim() != x1.dim()) throw DimensionMismatch("start and goal differ in dimension");
    if (forcing.dofs() != mandel_size(x1.dim())) throw DimensionMismatch("SPD forcing needs m(m+1)/2 DoFs");
    if (is_periodic(phase)) throw InvalidArgument("SPD DMPs need a decaying phase");
  }

  bool operator==(const SpdDmp&) const = default;
};

struct SpdState {
  SpdMatrix x;
  VectorXd sigma;  ///< Mandel vector at x1
  SpdMatrix goal;
  CanonicalState phase;
};

inline QuaternionState initial_state(const QuaternionDmp& dmp) {
  dmp.validate();
  return {dmp.q0, Vec3::Zero(), dmp.goal, make_phase(dmp.phase, dmp.gains.tau)};
}

inline RotationState initial_state(const RotationDmp& dmp) {
  dmp.validate();
  return {dmp.r0, Vec3::Zero(), dmp.goal, make_phase(dmp.phase, dmp.gains.tau)};
}

inline SpdState initial_state(const SpdDmp& dmp) {
  dmp.validate();
  return {dmp.x1, VectorXd::Zero(mandel_size(dmp.x1.dim())), dmp.goal, make_phase(dmp.phase, dmp.gains.tau)};
}

// ---------------------------------------------------------------------------
// Transformation systems (tau * d eta / dt before coupling)
// ---------------------------------------------------------------------------

namespace detail {

inline void check_orientation_coupling(const Coupling& c) {
  check_coupling(c, 3);
  if (c.goal_offset.size()) throw InvalidArgument("goal offsets are not defined for orientations");
}

inline Vec3 orientation_forcing(const ForcingModel& forcing, const CanonicalState& phase) {
  return eval_forcing(forcing, phase.value, elapsed_fraction(phase));
}

inline Vec3 quaternion_accel(const QuaternionDmp& dmp, const UnitQuaternion& q, const Vec3& eta,
                             const UnitQuaternion& goal, const CanonicalState& phase) {
  const Gains& k = dmp.gains;
  const UnitQuaternion g = dmp.delayed_goal ? dmp.delayed_goal->at(phase.clock) : goal;
  const Vec3 f = orientation_forcing(dmp.forcing, phase);
  if (dmp.variant == Variant::TargetCrossing) {
    const VectorXd rate = dmp.crossing_velocity.size() ? dmp.crossing_velocity : VectorXd::Zero(3);
    const MovingTarget<UnitQuaternion> target{g, rate, k.tau * nominal_duration(dmp.phase)};
    const Vec3 err = quat_error(target.at(phase.clock), q);
    return (1.0 - phase.value) * (k.alpha_z * (k.beta_z * err + k.tau * Vec3(rate) - eta) + f);
  }
  return k.alpha_z * (k.beta_z * quat_error(g, q) - eta) + f;
}

inline Vec3 rotation_accel(const RotationDmp& dmp, const Rotation3& r, const Vec3& eta, const Rotation3& goal,
                           const CanonicalState& phase) {
  const Gains& k = dmp.gains;
  return k.alpha_z * (k.beta_z * rot_log(goal * r.transpose()) - eta) + orientation_forcing(dmp.forcing, phase);
}

inline VectorXd spd_goal_error(const SpdDmp& dmp, const SpdMatrix& x, const SpdMatrix& goal) {
  return mandel_vec(spd_transport(x, dmp.x1, spd_log(x, goal)));
}

inline VectorXd spd_accel(const SpdDmp& dmp, const SpdMatrix& x, const VectorXd& sigma, const SpdMatrix& goal,
                          const CanonicalState& phase) {
  const Gains& k = dmp.gains;
  return k.alpha_z * (k.beta_z * spd_goal_error(dmp, x, goal) - sigma) +
         eval_forcing(dmp.forcing, phase.value, elapsed_fraction(phase));
}

inline Vec3 vec_or_zero(const VectorXd& v) { return v.size() ? Vec3(v) : Vec3::Zero(); }

inline UnitQuaternion apply_rotation_vector(const Vec3& v, const UnitQuaternion& q) {
  // Exp takes half the rotation vector; split large increments so each factor stays in its domain.
  const double half = 0.5 * v.norm();
  if (!std::isfinite(half)) throw StepTooLarge("non-finite orientation increment");
  const int pieces = static_cast<int>(std::floor(half / 3.0)) + 1;
  if (pieces > 1000) throw StepTooLarge("orientation increment too large to substep");
  UnitQuaternion out = q;
  const UnitQuaternion inc = quat_exp(0.5 * v / pieces);
  for (int i = 0; i < pieces; ++i) out = inc * out;
  return out;
}

inline Rotation3 apply_rotation_vector(const Vec3& v, const Rotation3& r) {
  if (!v.allFinite()) throw StepTooLarge("non-finite orientation increment");
  return rot_exp(v) * r;
}

// Runge-Kutta-Munthe-Kaas step in the rotation-vector chart around the current orientation:
// v' = dexp^-1_v(omega) = omega - v x omega / 2 + v x (v x omega) / 12.
template <class Orientation, class Accel>
std::pair<Orientation, Vec3> rkmk4(const Orientation& o, const Vec3& eta, double dt, double scale, const Vec3& cvel,
                                   const CanonicalState& p0, const CanonicalState& pm, const CanonicalState& p1,
                                   Accel&& accel) {
  auto rate = [&](const Vec3& v, const Vec3& e, const CanonicalState& ph) {
    const Vec3 w = (e + cvel) * scale;
    const Vec3 vdot = w - 0.5 * v.cross(w) + v.cross(v.cross(w)) / 12.0;
    return std::pair<Vec3, Vec3>{vdot, accel(apply_rotation_vector(v, o), e, ph) * scale};
  };
  const Vec3 v0 = Vec3::Zero();
  const auto k1 = rate(v0, eta, p0);
  const auto k2 = rate(v0 + 0.5 * dt * k1.first, eta + 0.5 * dt * k1.second, pm);
  const auto k3 = rate(v0 + 0.5 * dt * k2.first, eta + 0.5 * dt * k2.second, pm);
  const auto k4 = rate(v0 + dt * k3.first, eta + dt * k3.second, p1);
  const Vec3 v = dt / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
  const Vec3 e = eta + dt / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
  return {apply_rotation_vector(v, o), e};
}

template <class Orientation, class Accel>
std::pair<Orientation, Vec3> orientation_step(const Orientation& o, const Vec3& eta, const CanonicalState& phase,
                                              double dt, double tau, const Coupling& c, Integrator integrator,
                                              Accel&& accel) {
  const double scale = 1.0 / (tau * c.speed);
  const Vec3 cacc = vec_or_zero(c.acceleration);
  const Vec3 cvel = vec_or_zero(c.velocity);
  auto total = [&](const Orientation& oo, const Vec3& e, const CanonicalState& ph) -> Vec3 {
    return accel(oo, e, ph) + cacc;
  };
  if (integrator == Integrator::SemiImplicitEuler) {
    const Vec3 e = eta + dt * scale * total(o, eta, phase);
    return {apply_rotation_vector(dt * scale * (e + cvel), o), e};
  }
  const double rate = 1.0 / c.speed;
  return rkmk4(o, eta, dt, scale, cvel, phase, step_phase(phase, 0.5 * dt, c.stop, rate),
               step_phase(phase, dt, c.stop, rate), total);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Steps
// ---------------------------------------------------------------------------

/// eta advances by the transformation system, q by Exp(dt omega / 2) * q.
inline QuaternionState step(const QuaternionDmp& dmp, const QuaternionState& s, double dt, const Coupling& c = {},
                            Integrator integrator = Integrator::SemiImplicitEuler) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidStep("dt must be positive");
  detail::check_orientation_coupling(c);
  auto accel = [&](const UnitQuaternion& q, const Vec3& eta, const CanonicalState& ph) {
    return detail::quaternion_accel(dmp, q, eta, s.goal, ph);
  };
  QuaternionState n = s;
  std::tie(n.q, n.eta) = detail::orientation_step(s.q, s.eta, s.phase, dt, dmp.gains.tau, c, integrator, accel);
  n.phase = step_phase(s.phase, dt, c.stop, 1.0 / c.speed);
  return n;
}

/// eta advances by the transformation system, R by Exp(dt omega) R.
inline RotationState step(const RotationDmp& dmp, const RotationState& s, double dt, const Coupling& c = {},
                          Integrator integrator = Integrator::SemiImplicitEuler) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidStep("dt must be positive");
  detail::check_orientation_coupling(c);
  auto accel = [&](const Rotation3& r, const Vec3& eta, const CanonicalState& ph) {
    return detail::rotation_accel(dmp, r, eta, s.goal, ph);
  };
  RotationState n = s;
  std::tie(n.r, n.eta) = detail::orientation_step(s.r, s.eta, s.phase, dt, dmp.gains.tau, c, integrator, accel);
  n.phase = step_phase(s.phase, dt, c.stop, 1.0 / c.speed);
  return n;
}

/// sigma advances in the tangent space at x1; X moves along Exp_X of the transported sigma.
/// Only the semi-implicit Euler scheme is available on the SPD cone.
inline SpdState step(const SpdDmp& dmp, const SpdState& s, double dt, const Coupling& c = {},
                     Integrator integrator = Integrator::SemiImplicitEuler) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidStep("dt must be positive");
  if (integrator != Integrator::SemiImplicitEuler) throw InvalidArgument("SPD DMPs integrate with Euler only");
  detail::check_coupling(c, s.sigma.size());
  if (c.goal_offset.size()) throw InvalidArgument("goal offsets are not defined for SPD matrices");
  const double scale = dt / (dmp.gains.tau * c.speed);
  VectorXd acc = detail::spd_accel(dmp, s.x, s.sigma, s.goal, s.phase);
  if (c.acceleration.size()) acc += c.acceleration;
  SpdState n = s;
  n.sigma = s.sigma + scale * acc;
  VectorXd vel = n.sigma;
  if (c.velocity.size()) vel += c.velocity;
  n.x = spd_exp(s.x, spd_transport(dmp.x1, s.x, mandel_mat(vel)) * scale);
  n.phase = step_phase(s.phase, dt, c.stop, 1.0 / c.speed);
  return n;
}

// ---------------------------------------------------------------------------
// Goal switching: the goal moves along the geodesic toward g_new with
// distance decaying as exp(-alpha_g t / tau).
// ---------------------------------------------------------------------------

namespace detail {
inline double switch_fraction(double alpha_g, double dt, double tau) {
  if (!(alpha_g > 0.0)) throw InvalidArgument("alpha_g must be positive");
  if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
  return -std::expm1(-alpha_g * dt / tau);
}
}  // namespace detail

inline QuaternionState goal_switch_step(const QuaternionState& s, const UnitQuaternion& g_new, double alpha_g,
                                        double dt) {
  QuaternionState n = s;
  n.goal = quat_slerp(s.goal, g_new, detail::switch_fraction(alpha_g, dt, s.phase.tau));
  return n;
}

inline RotationState goal_switch_step(const RotationState& s, const Rotation3& g_new, double alpha_g, double dt) {
  RotationState n = s;
  const double frac = detail::switch_fraction(alpha_g, dt, s.phase.tau);
  n.goal = rot_exp(frac * rot_log(g_new * s.goal.transpose())) * s.goal;
  return n;
}

inline SpdState goal_switch_step(const SpdState& s, const SpdMatrix& g_new, double alpha_g, double dt) {
  if (g_new.dim() != s.goal.dim()) throw DimensionMismatch("new goal has the wrong dimension");
  SpdState n = s;
  n.goal = spd_geodesic(s.goal, g_new, detail::switch_fraction(alpha_g, dt, s.phase.tau));
  return n;
}

// ---------------------------------------------------------------------------
// Rollouts
// ---------------------------------------------------------------------------

using QuaternionRolloutOptions = BasicRolloutOptions<QuaternionState, UnitQuaternion>;
using RotationRolloutOptions = BasicRolloutOptions<RotationState, Rotation3>;
using SpdRolloutOptions = BasicRolloutOptions<SpdState, SpdMatrix>;

// Per-sample velocity/acceleration and point, as recorded by the rollout loop.
inline std::pair<VectorXd, VectorXd> rollout_rate(const QuaternionDmp& dmp, const QuaternionState& s,
                                                 const Coupling& c) {
  const double scale = 1.0 / (dmp.gains.tau * c.speed);
  const Vec3 acc = detail::quaternion_accel(dmp, s.q, s.eta, s.goal, s.phase) + detail::vec_or_zero(c.acceleration);
  return {VectorXd((s.eta + detail::vec_or_zero(c.velocity)) * scale), VectorXd(acc * scale * scale)};
}

inline std::pair<VectorXd, VectorXd> rollout_rate(const RotationDmp& dmp, const RotationState& s, const Coupling& c) {
  const double scale = 1.0 / (dmp.gains.tau * c.speed);
  const Vec3 acc = detail::rotation_accel(dmp, s.r, s.eta, s.goal, s.phase) + detail::vec_or_zero(c.acceleration);
  return {VectorXd((s.eta + detail::vec_or_zero(c.velocity)) * scale), VectorXd(acc * scale * scale)};
}

inline std::pair<VectorXd, VectorXd> rollout_rate(const SpdDmp& dmp, const SpdState& s, const Coupling& c) {
  const double scale = 1.0 / (dmp.gains.tau * c.speed);
  VectorXd acc = detail::spd_accel(dmp, s.x, s.sigma, s.goal, s.phase);
  if (c.acceleration.size()) acc += c.acceleration;
  VectorXd vel = s.sigma;
  if (c.velocity.size()) vel += c.velocity;
  return {vel * scale, acc * scale * scale};
}

inline const UnitQuaternion& rollout_point(const QuaternionState& s) { return s.q; }
inline const Rotation3& rollout_point(const RotationState& s) { return s.r; }
inline const SpdMatrix& rollout_point(const SpdState& s) { return s.x; }


inline Trajectory<UnitQuaternion> rollout_from(const QuaternionDmp& dmp, const QuaternionState& s,
                                               const QuaternionRolloutOptions& o, double t0 = 0.0) {
  return detail::rollout_loop(dmp, s, o, t0);
}
inline Trajectory<UnitQuaternion> rollout(const QuaternionDmp& dmp, const QuaternionRolloutOptions& o = {}) {
  return rollout_from(dmp, initial_state(dmp), o);
}

inline Trajectory<Rotation3> rollout_from(const RotationDmp& dmp, const RotationState& s,
                                          const RotationRolloutOptions& o, double t0 = 0.0) {
  return detail::rollout_loop(dmp, s, o, t0);
}
inline Trajectory<Rotation3> rollout(const RotationDmp& dmp, const RotationRolloutOptions& o = {}) {
  return rollout_from(dmp, initial_state(dmp), o);
}

inline Trajectory<SpdMatrix> rollout_from(const SpdDmp& dmp, const SpdState& s, const SpdRolloutOptions& o,
                                          double t0 = 0.0) {
  return detail::rollout_loop(dmp, s, o, t0);
}
inline Trajectory<SpdMatrix> rollout(const SpdDmp& dmp, const SpdRolloutOptions& o = {}) {
  return rollout_from(dmp, initial_state(dmp), o);
}

// ---------------------------------------------------------------------------
// Learning
// ---------------------------------------------------------------------------

/// tau^2 omegadot - alpha_z (beta_z 2 Log(g * conj(q)) - tau omega); TargetCrossing as in the R^J case.
inline MatrixXd forcing_target(const QuaternionDmp& skeleton, const Demonstration<UnitQuaternion>& demo_in) {
  const Demonstration<UnitQuaternion> demo = with_derivatives(demo_in);
  const Gains& k = skeleton.gains;
  MatrixXd f(static_cast<Eigen::Index>(demo.size()), 3);
  for (std::size_t t = 0; t < demo.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const Vec3 w = demo.velocity.row(r).transpose();
    const Vec3 wd = demo.acceleration.row(r).transpose();
    const CanonicalState ph = detail::phase_at(skeleton.phase, k.tau, demo.times[t] - demo.times.front());
    const UnitQuaternion g = skeleton.delayed_goal ? skeleton.delayed_goal->at(ph.clock) : skeleton.goal;
    Vec3 row;
    if (skeleton.variant == Variant::TargetCrossing) {
      const double wgt = 1.0 - ph.value;
      const VectorXd rate = skeleton.crossing_velocity.size() ? skeleton.crossing_velocity : VectorXd::Zero(3);
      const MovingTarget<UnitQuaternion> target{g, rate, k.tau * nominal_duration(skeleton.phase)};
      const Vec3 bracket = k.alpha_z * (k.beta_z * quat_error(target.at(ph.clock), demo.samples[t]) +
                                        k.tau * (Vec3(rate) - w));
      row = wgt < 1e-12 ? Vec3::Zero() : Vec3(k.tau * k.tau * wd / wgt - bracket);
    } else {
      row = k.tau * k.tau * wd - k.alpha_z * (k.beta_z * quat_error(g, demo.samples[t]) - k.tau * w);
    }
    f.row(r) = row.transpose();
  }
  return f;
}

/// tau^2 omegadot - alpha_z (beta_z Log(R_g R^T) - tau omega).
inline MatrixXd forcing_target(const RotationDmp& skeleton, const Demonstration<Rotation3>& demo_in) {
  const Demonstration<Rotation3> demo = with_derivatives(demo_in);
  const Gains& k = skeleton.gains;
  MatrixXd f(static_cast<Eigen::Index>(demo.size()), 3);
  for (std::size_t t = 0; t < demo.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const Vec3 err = rot_log(skeleton.goal * demo.samples[t].transpose());
    f.row(r) = k.tau * k.tau * demo.acceleration.row(r) -
               k.alpha_z * (k.beta_z * err.transpose() - k.tau * demo.velocity.row(r));
  }
  return f;
}

/// tau^2 vdot - alpha_z (beta_z vec(B_{X->X1}(Log_X(X_g))) - tau v), all at the base x1.
inline MatrixXd forcing_target(const SpdDmp& skeleton, const Demonstration<SpdMatrix>& demo_in) {
  if (demo_in.samples.empty() || !(demo_in.samples.front() == skeleton.x1)) {
    throw InvalidArgument("SPD demo must start at the model base x1");
  }
  const Demonstration<SpdMatrix> demo = with_derivatives(demo_in);
  const Gains& k = skeleton.gains;
  const Eigen::Index n = mandel_size(skeleton.x1.dim());
  MatrixXd f(static_cast<Eigen::Index>(demo.size()), n);
  for (std::size_t t = 0; t < demo.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const VectorXd err = detail::spd_goal_error(skeleton, demo.samples[t], skeleton.goal);
    f.row(r) = k.tau * k.tau * demo.acceleration.row(r) -
               k.alpha_z * (k.beta_z * err.transpose() - k.tau * demo.velocity.row(r));
  }
  return f;
}

inline QuaternionDmp train_quaternion(const Demonstration<UnitQuaternion>& demo_in, const TrainOptions& o = {}) {
  const Demonstration<UnitQuaternion> demo = with_derivatives(demo_in);
  QuaternionDmp dmp;
  detail::apply_timing(dmp.gains, dmp.phase, o, demo.duration());
  dmp.variant = o.variant;
  const std::vector<UnitQuaternion> aligned = sign_aligned(demo.samples);
  dmp.q0 = aligned.front();
  dmp.goal = aligned.back();
  dmp.forcing = ForcingModel::zeros(detail::training_layout(o), 3);
  if (o.delayed_goal) {
    dmp.delayed_goal =
        DelayedGoal<UnitQuaternion>{dmp.q0, {dmp.goal}, {dmp.gains.tau * nominal_duration(dmp.phase)}};
  }
  if (o.variant == Variant::TargetCrossing) {
    dmp.crossing_velocity = o.crossing_velocity.value_or(VectorXd(demo.velocity.bottomRows(1).transpose()));
  }
  dmp.validate();
  dmp.forcing =
      detail::fit_forcing(dmp.forcing.layout, dmp.phase, dmp.gains.tau, demo.times, forcing_target(dmp, demo), o);
  return dmp;
}

inline RotationDmp train_rotation(const Demonstration<Rotation3>& demo_in, const TrainOptions& o = {}) {
  if (o.variant != Variant::Classical || o.delayed_goal) {
    throw InvalidArgument("rotation-matrix DMPs support the classical form only");
  }
  const Demonstration<Rotation3> demo = with_derivatives(demo_in);
  RotationDmp dmp;
  detail::apply_timing(dmp.gains, dmp.phase, o, demo.duration());
  dmp.r0 = demo.samples.front();
  dmp.goal = demo.samples.back();
  dmp.forcing = ForcingModel::zeros(detail::training_layout(o), 3);
  dmp.validate();
  dmp.forcing =
      detail::fit_forcing(dmp.forcing.layout, dmp.phase, dmp.gains.tau, demo.times, forcing_target(dmp, demo), o);
  return dmp;
}

inline SpdDmp train_spd(const Demonstration<SpdMatrix>& demo_in, const TrainOptions& o = {}) {
  if (o.variant != Variant::Classical || o.delayed_goal) {
    throw InvalidArgument("SPD DMPs support the classical form only");
  }
  demo_in.validate_demo();
  SpdDmp dmp;
  detail::apply_timing(dmp.gains, dmp.phase, o, demo_in.duration());
  dmp.x1 = demo_in.samples.front();
  dmp.goal = demo_in.samples.back();
  dmp.forcing = ForcingModel::zeros(detail::training_layout(o), mandel_size(dmp.x1.dim()));
  dmp.validate();
  dmp.forcing = detail::fit_forcing(dmp.forcing.layout, dmp.phase, dmp.gains.tau, demo_in.times,
                                    forcing_target(dmp, demo_in), o);
  return dmp;
}

}  // namespace dmp
