#pragma once

// Canonical systems. Every variant is driven by an internal phase clock that
// advances by dt / (1 + gain * error) per step, so phase stopping acts the same
// way on all of them. The phase value is a closed-form function of that clock,
// which makes stepping exact for piecewise-constant feedback.

#include <cmath>
#include <optional>
#include <variant>

#include "dmp/errors.hpp"
#include "dmp/manifold.hpp"

namespace dmp {

/// tau xdot = -alpha_x x. The default makes x(tau) = 1e-3.
struct ExponentialPhase {
  double alpha_x = std::log(1000.0);

  bool operator==(const ExponentialPhase&) const = default;
};

/// Logistic drop centred at normalized time T with steepness alpha_s / sample_time.
struct SigmoidalPhase {
  double alpha_s = 0.4;
  double sample_time = 0.01;
  double T = 1.0;

  double steepness() const { return alpha_s / sample_time; }

  /// alpha_s / sample_time = 40 / T.
  static SigmoidalPhase with_defaults(double T = 1.0, double sample_time = 0.01) {
    return {40.0 * sample_time / T, sample_time, T};
  }

  bool operator==(const SigmoidalPhase&) const = default;
};

/// Decays linearly from 1 to 0 over normalized time T, then stays at 0.
struct PiecewiseLinearPhase {
  double T = 1.0;

  bool operator==(const PiecewiseLinearPhase&) const = default;
};

/// tau phidot = 1.
struct PeriodicPhase {
  bool operator==(const PeriodicPhase&) const = default;
};

using PhaseConfig = std::variant<ExponentialPhase, SigmoidalPhase, PiecewiseLinearPhase, PeriodicPhase>;

/// Tracking error fed back into the phase (phase stopping).
struct StopFeedback {
  double tracking_error = 0.0;
  double gain = 0.0;
};

struct CanonicalState {
  PhaseConfig config = ExponentialPhase{};
  double tau = 1.0;
  double value = 1.0;    ///< x, s, p, or phi mod 2 pi
  double elapsed = 0.0;  ///< wall-clock time since start [s]
  double clock = 0.0;    ///< phase time; lags `elapsed` while stopped or slowed
};

inline bool is_periodic(const PhaseConfig& c) { return std::holds_alternative<PeriodicPhase>(c); }

/// Phase value after `clock` seconds of undisturbed evolution.
inline double phase_value_at(const PhaseConfig& config, double tau, double clock) {
  struct Visitor {
    double tau, clock;
    double operator()(const ExponentialPhase& e) const { return std::exp(-e.alpha_x * clock / tau); }
    double operator()(const SigmoidalPhase& s) const {
      return 1.0 / (1.0 + std::exp(s.steepness() * (clock / tau - s.T)));
    }
    double operator()(const PiecewiseLinearPhase& p) const {
      const double v = 1.0 - clock / (tau * p.T);
      return v <= 1e-12 ? 0.0 : v;
    }
    double operator()(const PeriodicPhase&) const { return std::fmod(clock / tau, 2.0 * kPi); }
  };
  return std::visit(Visitor{tau, clock}, config);
}

/// Nominal normalized duration T of the phase (1 for exponential and periodic).
inline double nominal_duration(const PhaseConfig& config) {
  if (const auto* s = std::get_if<SigmoidalPhase>(&config)) return s->T;
  if (const auto* p = std::get_if<PiecewiseLinearPhase>(&config)) return p->T;
  return 1.0;
}

inline CanonicalState make_phase(const PhaseConfig& config, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  CanonicalState s;
  s.config = config;
  s.tau = tau;
  s.value = phase_value_at(config, tau, 0.0);
  return s;
}

/// Advances the canonical system by dt. `rate` divides time as in speed scaling
/// (rate = 1/upsilon); stop feedback slows the clock by 1/(1 + gain * error).
inline CanonicalState step_phase(const CanonicalState& state, double dt, std::optional<StopFeedback> stop = {},
                                 double rate = 1.0) {
  if (!(dt > 0.0)) throw InvalidStep("dt must be positive");
  double advance = dt * rate;
  if (stop) {
    if (!(stop->gain >= 0.0) || !(stop->tracking_error >= 0.0)) throw InvalidArgument("stop feedback must be >= 0");
    const double slow = stop->gain * stop->tracking_error;
    advance = std::isinf(slow) ? 0.0 : advance / (1.0 + slow);
  }
  CanonicalState next = state;
  next.elapsed += dt;
  next.clock += advance;
  next.value = phase_value_at(state.config, state.tau, next.clock);
  return next;
}

/// True once a decaying phase has fallen to `threshold`; never for periodic phases.
inline bool phase_done(const CanonicalState& state, double threshold) {
  if (is_periodic(state.config)) return false;
  return state.value <= threshold;
}

/// Normalized elapsed time t / (tau T) used by time-indexed kernels.
inline double elapsed_fraction(const CanonicalState& state) {
  return state.clock / (state.tau * nominal_duration(state.config));
}

/// Unwrapped phase angle for periodic phases.
inline double phase_angle(const CanonicalState& state) { return state.clock / state.tau; }

}  // namespace dmp
