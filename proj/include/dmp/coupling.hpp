#pragma once

// Online modulation of discrete rollouts. Every term here is expressed as a
// Coupling value, so it plugs into step() directly or into a rollout through
// the per-step coupling hook.

#include <cmath>
#include <functional>
#include <memory>

#include "dmp/basis.hpp"
#include "dmp/discrete.hpp"
#include "dmp/errors.hpp"

namespace dmp {

/// Sum of two couplings: vectors add, speed factors multiply, `a`'s stop feedback wins.
inline Coupling combine(const Coupling& a, const Coupling& b) {
  auto add = [](const VectorXd& u, const VectorXd& v) -> VectorXd {
    if (!u.size()) return v;
    if (!v.size()) return u;
    if (u.size() != v.size()) throw DimensionMismatch("coupling dimension");
    return u + v;
  };
  Coupling c;
  c.acceleration = add(a.acceleration, b.acceleration);
  c.velocity = add(a.velocity, b.velocity);
  c.goal_offset = add(a.goal_offset, b.goal_offset);
  c.speed = a.speed * b.speed;
  c.stop = a.stop ? a.stop : b.stop;
  return c;
}

using CouplingHook = std::function<Coupling(double, const DiscreteState&)>;

// ---------------------------------------------------------------------------
// Obstacle avoidance
// ---------------------------------------------------------------------------

/// Repulsive field around a point obstacle. Active within `radius`.
struct ObstacleField {
  VectorXd center;
  double gain = 1.0;    ///< gamma
  double zeta = 1.0;    ///< steepness
  double radius = 1.0;  ///< r0

  void validate() const {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) throw InvalidArgument("obstacle steepness must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("obstacle radius must be positive");
    if (!std::isfinite(gain)) throw InvalidArgument("obstacle gain must be finite");
    if (!center.allFinite()) throw InvalidArgument("obstacle position must be finite");
  }

  /// d_s(r) = max(0, 1 - r / r0)^2.
  double activation(double r) const {
    const double a = 1.0 - r / radius;
    return a > 0.0 ? a * a : 0.0;
  }
};

/// gamma d_s(|O - y|) sgn(y - O) exp(-zeta |O - y|), per component; added to tau zdot.
inline VectorXd obstacle_term(const ObstacleField& field, const VectorXd& y) {
  field.validate();
  if (y.size() != field.center.size()) throw DimensionMismatch("obstacle and state differ in dimension");
  if (!y.allFinite()) throw InvalidArgument("non-finite position");
  const VectorXd d = y - field.center;
  const double ds = field.activation(d.norm());
  VectorXd c = VectorXd::Zero(y.size());
  if (ds == 0.0) return c;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double sign = d[i] > 0.0 ? 1.0 : (d[i] < 0.0 ? -1.0 : 0.0);
    c[i] = field.gain * ds * sign * std::exp(-field.zeta * std::abs(d[i]));
  }
  return c;
}

inline CouplingHook obstacle_hook(ObstacleField field) {
  field.validate();
  return [field](double, const DiscreteState& s) {
    Coupling c;
    c.acceleration = obstacle_term(field, s.y);
    return c;
  };
}

// ---------------------------------------------------------------------------
// Force coupling
// ---------------------------------------------------------------------------

enum class ForceMode {
  Additive,    ///< tau ydot = z + C_f, tau zdot += dC_f/dt, C_f = gain F
  Admittance,  ///< dC_a/dt = gain (F_d - F_e) on the velocity, C_a on the goal
  PD           ///< tau ydot = z + gain (K_p (F_d - F_e) - D_v dF_e/dt)
};

struct ForceCoupling {
  ForceMode mode = ForceMode::Additive;
  double gain = 1.0;  ///< varsigma
  VectorXd desired;   ///< F_d; empty means zero
  double kp = 1.0;
  double dv = 0.0;

  void validate() const {
    if (!(gain >= 0.0) || !std::isfinite(gain)) throw InvalidArgument("force gain must be finite and >= 0");
    if (!std::isfinite(kp) || !std::isfinite(dv)) throw InvalidArgument("PD gains must be finite");
    if (!desired.allFinite()) throw InvalidArgument("desired force must be finite");
  }
};

/// Memory carried between coupled steps.
struct ForceCouplingState {
  VectorXd offset;          ///< C_a (admittance)
  VectorXd previous_term;   ///< C_f of the previous step (additive)
  VectorXd previous_force;  ///< F_e of the previous step (PD)
};

/// Coupling for one step of length dt given the measured force, and the updated memory.
inline std::pair<Coupling, ForceCouplingState> force_coupling_terms(const ForceCoupling& fc,
                                                                    const ForceCouplingState& mem,
                                                                    const VectorXd& force, double dt) {
  fc.validate();
  if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
  if (!force.allFinite()) throw InvalidArgument("measured force must be finite");
  const Eigen::Index j = force.size();
  if (fc.desired.size() && fc.desired.size() != j) throw DimensionMismatch("desired force dimension");
  const VectorXd fd = fc.desired.size() ? fc.desired : VectorXd::Zero(j);

  Coupling c;
  ForceCouplingState next = mem;
  switch (fc.mode) {
    case ForceMode::Additive: {
      const VectorXd cf = fc.gain * force;
      const VectorXd prev = mem.previous_term.size() ? mem.previous_term : cf;
      c.velocity = cf;
      c.acceleration = (cf - prev) / dt;
      next.previous_term = cf;
      break;
    }
    case ForceMode::Admittance: {
      const VectorXd offset = mem.offset.size() ? mem.offset : VectorXd::Zero(j);
      const VectorXd rate = fc.gain * (fd - force);
      c.velocity = rate;
      c.goal_offset = offset;
      next.offset = offset + dt * rate;
      break;
    }
    case ForceMode::PD: {
      const VectorXd prev = mem.previous_force.size() ? mem.previous_force : force;
      c.velocity = fc.gain * (fc.kp * (fd - force) - fc.dv * (force - prev) / dt);
      next.previous_force = force;
      break;
    }
  }
  return {std::move(c), std::move(next)};
}

struct ForceStep {
  DiscreteState state;
  ForceCouplingState coupling;
};

inline ForceStep force_coupled_step(const DiscreteDmp& dmp, const DiscreteState& s, double dt, const ForceCoupling& fc,
                                    const ForceCouplingState& mem, const VectorXd& measured,
                                    Integrator integrator = Integrator::SemiImplicitEuler) {
  auto [c, next] = force_coupling_terms(fc, mem, measured, dt);
  return {step(dmp, s, dt, c, integrator), std::move(next)};
}

/// Measured force as a function of time and state (a simulated environment or a sensor).
using ForceSampler = std::function<VectorXd(double, const DiscreteState&)>;

/// Rollout hook that samples the force once per step of length dt. Each hook
/// keeps its own memory, so use a fresh one per rollout.
inline CouplingHook force_hook(ForceCoupling fc, ForceSampler sampler, double dt) {
  fc.validate();
  if (!sampler) throw InvalidArgument("force sampler is empty");
  auto mem = std::make_shared<ForceCouplingState>();
  return [fc = std::move(fc), sampler = std::move(sampler), dt, mem](double t, const DiscreteState& s) {
    auto [c, next] = force_coupling_terms(fc, *mem, sampler(t, s), dt);
    *mem = std::move(next);
    return c;
  };
}

// ---------------------------------------------------------------------------
// Speed scaling
// ---------------------------------------------------------------------------

/// upsilon(x) = max(floor, sum_i Psi_i(x) v_i / sum_i Psi_i(x)).
struct SpeedProfile {
  KernelLayout layout;
  VectorXd values;
  double floor = 0.05;

  static SpeedProfile constant(double v) {
    return {KernelLayout{KernelKind::GaussianPhase, Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0)},
            VectorXd::Constant(2, v), std::min(0.05, v)};
  }

  void validate() const {
    layout.validate();
    if (layout.kind == KernelKind::VonMises) throw InvalidArgument("speed profiles use Gaussian kernels");
    if (values.size() != layout.size()) throw DimensionMismatch("one speed value per kernel");
    if (!(floor > 0.0) || !values.allFinite()) throw InvalidArgument("speed floor must be positive");
  }

  /// Kernels are indexed by the phase value, or by normalized time for GaussianTime layouts.
  double at(const CanonicalState& phase) const {
    const double arg = layout.kind == KernelKind::GaussianTime ? elapsed_fraction(phase) : phase.value;
    const VectorXd psi = activations(layout, arg);
    const double sum = psi.sum();
    const double v = sum > 1e-300 ? psi.dot(values) / sum : values.mean();
    return std::max(floor, v);
  }
};

inline DiscreteState speed_scaled_step(const DiscreteDmp& dmp, const DiscreteState& s, double dt,
                                       const SpeedProfile& profile,
                                       Integrator integrator = Integrator::SemiImplicitEuler) {
  profile.validate();
  Coupling c;
  c.speed = profile.at(s.phase);
  return step(dmp, s, dt, c, integrator);
}

inline CouplingHook speed_hook(SpeedProfile profile) {
  profile.validate();
  return [profile = std::move(profile)](double, const DiscreteState& s) {
    Coupling c;
    c.speed = profile.at(s.phase);
    return c;
  };
}

}  // namespace dmp
