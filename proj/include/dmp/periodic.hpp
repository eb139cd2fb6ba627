#pragma once

// Rhythmic DMP:
//   zdot = Omega (alpha (beta (-y) - z) + f(phi))
//   ydot = Omega z
//   phidot = Omega
// y is measured from `anchor`, which is added back on output.

#include <cmath>
#include <functional>
#include <optional>

#include "dmp/basis.hpp"
#include "dmp/errors.hpp"
#include "dmp/learning.hpp"
#include "dmp/phase.hpp"
#include "dmp/trajectory.hpp"

namespace dmp {

struct PeriodicDmp {
  double alpha = 25.0;
  double beta = 6.25;
  double omega = 2.0 * kPi;  ///< [rad/s]
  ForcingModel forcing;      ///< VonMises layout; amplitude is r
  VectorXd anchor;
  VectorXd y0;  ///< initial offset from the anchor

  Eigen::Index dofs() const { return anchor.size(); }

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(omega > 0.0) || !std::isfinite(omega)) {
      throw InvalidArgument("periodic gains and frequency must be positive");
    }
    forcing.validate();
    if (forcing.layout.kind != KernelKind::VonMises) throw InvalidArgument("periodic DMPs need VonMises kernels");
    if (!std::isfinite(forcing.amplitude)) throw InvalidArgument("non-finite amplitude");
    if (anchor.size() < 1 || forcing.dofs() != anchor.size() || y0.size() != anchor.size()) {
      throw DimensionMismatch("anchor, start and forcing disagree on the DoF count");
    }
  }

  bool operator==(const PeriodicDmp&) const = default;
};

struct PeriodicState {
  VectorXd y;  ///< offset from the anchor
  VectorXd z;
  CanonicalState phase;
};

inline PeriodicState initial_state(const PeriodicDmp& dmp) {
  dmp.validate();
  return {dmp.y0, VectorXd::Zero(dmp.dofs()), make_phase(PeriodicPhase{}, 1.0 / dmp.omega)};
}

/// Semi-implicit Euler step; `coupling` (optional) is added inside the bracket of zdot.
inline PeriodicState step(const PeriodicDmp& dmp, const PeriodicState& s, double dt, const VectorXd& coupling = {}) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidStep("dt must be positive");
  if (coupling.size() != 0 && coupling.size() != dmp.dofs()) throw DimensionMismatch("coupling dimension");
  VectorXd acc = dmp.alpha * (dmp.beta * (-s.y) - s.z) + eval_forcing(dmp.forcing, s.phase.value);
  if (coupling.size()) acc += coupling;
  PeriodicState n = s;
  n.z = s.z + dt * dmp.omega * acc;
  n.y = s.y + dt * dmp.omega * n.z;
  n.phase = step_phase(s.phase, dt);
  if (!n.y.allFinite() || !n.z.allFinite()) throw StepTooLarge("integration diverged");
  return n;
}

struct PeriodicRolloutOptions {
  double dt = 0.01;
  double duration = 1.0;
  int substeps = 1;  ///< internal steps per recorded sample
  std::function<VectorXd(double, const PeriodicState&)> coupling;
};

/// Records y + anchor and ydot at every dt.
inline Trajectory<VectorXd> rollout_from(const PeriodicDmp& dmp, PeriodicState state, const PeriodicRolloutOptions& o) {
  dmp.validate();
  if (!(o.dt > 0.0)) throw InvalidStep("dt must be positive");
  if (o.substeps < 1) throw InvalidArgument("substeps must be >= 1");
  if (!(o.duration >= 0.0)) throw InvalidArgument("duration must be >= 0");
  const auto n = static_cast<std::size_t>(std::ceil(o.duration / o.dt - 1e-9));
  const double h = o.dt / o.substeps;
  Trajectory<VectorXd> traj;
  traj.velocity.resize(static_cast<Eigen::Index>(n + 1), dmp.dofs());
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * o.dt;
    traj.times.push_back(t);
    traj.samples.push_back(state.y + dmp.anchor);
    traj.phase.push_back(state.phase.value);
    traj.velocity.row(static_cast<Eigen::Index>(k)) = (dmp.omega * state.z).transpose();
    if (k == n) break;
    for (int i = 0; i < o.substeps; ++i) {
      const VectorXd c = o.coupling ? o.coupling(t + i * h, state) : VectorXd();
      state = step(dmp, state, h, c);
    }
  }
  return traj;
}

inline Trajectory<VectorXd> rollout(const PeriodicDmp& dmp, const PeriodicRolloutOptions& o) {
  return rollout_from(dmp, initial_state(dmp), o);
}

// ---------------------------------------------------------------------------
// Learning
// ---------------------------------------------------------------------------

enum class PeriodicFit {
  Batch,      ///< global least squares over normalized kernels
  Kernelwise  ///< per-kernel recursive regression, `passes` sweeps over the demo
};

struct PeriodicTrainOptions {
  int kernels = 20;
  double alpha = 25.0;
  double beta = 6.25;
  double amplitude = 1.0;
  PeriodicFit method = PeriodicFit::Batch;
  int passes = 1;
  double lambda = 1.0;
  std::optional<double> ridge;
};

/// f_d = ydd / Omega^2 + alpha beta y + alpha yd / Omega, with y about the demo mean.
inline MatrixXd forcing_target(const PeriodicDmp& skeleton, const Demonstration<VectorXd>& demo_in) {
  const Demonstration<VectorXd> demo = with_derivatives(demo_in);
  const Eigen::Index j = skeleton.anchor.size();
  if (demo.velocity.cols() != j) throw DimensionMismatch("demo and model disagree on the DoF count");
  const double w = skeleton.omega;
  MatrixXd f(static_cast<Eigen::Index>(demo.size()), j);
  for (std::size_t t = 0; t < demo.size(); ++t) {
    const auto r = static_cast<Eigen::Index>(t);
    const VectorXd y = demo.samples[t] - skeleton.anchor;
    f.row(r) = (demo.acceleration.row(r) / (w * w) + skeleton.alpha * skeleton.beta * y.transpose() +
                skeleton.alpha * demo.velocity.row(r) / w);
  }
  return f;
}

inline PeriodicDmp train_periodic(const Demonstration<VectorXd>& demo_in, double omega,
                                  const PeriodicTrainOptions& o = {}) {
  const Demonstration<VectorXd> demo = with_derivatives(demo_in);
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  if (omega * demo.duration() < 2.0 * kPi * (1.0 - 1e-9)) throw DegenerateDemo("demo shorter than one period");
  const Eigen::Index j = demo.samples.front().size();

  PeriodicDmp dmp;
  dmp.alpha = o.alpha;
  dmp.beta = o.beta;
  dmp.omega = omega;
  dmp.anchor = as_matrix(demo).colwise().mean().transpose();
  dmp.y0 = demo.samples.front() - dmp.anchor;
  dmp.forcing = ForcingModel::zeros(default_layout(KernelKind::VonMises, o.kernels), j);
  dmp.forcing.amplitude = o.amplitude;
  dmp.validate();

  const MatrixXd f = forcing_target(dmp, demo);
  VectorXd phi(static_cast<Eigen::Index>(demo.size()));
  for (std::size_t t = 0; t < demo.size(); ++t) {
    phi[static_cast<Eigen::Index>(t)] = std::fmod(omega * (demo.times[t] - demo.times.front()), 2.0 * kPi);
  }

  if (o.method == PeriodicFit::Batch) {
    FitOptions fit;
    fit.ridge = o.ridge;
    fit.amplitude = o.amplitude;
    dmp.forcing = batch_fit(dmp.forcing.layout, phi, f, fit).model;
    return dmp;
  }
  if (o.passes < 1) throw InvalidArgument("passes must be >= 1");
  KernelwiseLearner learner = KernelwiseLearner::make(o.kernels, j, o.lambda, o.amplitude);
  for (int p = 0; p < o.passes; ++p) {
    for (Eigen::Index t = 0; t < phi.size(); ++t) {
      learner = kernelwise_fit_step(learner, activations(dmp.forcing.layout, phi[t]), f.row(t).transpose());
    }
  }
  dmp.forcing.weights = learner.w;
  return dmp;
}

}  // namespace dmp
