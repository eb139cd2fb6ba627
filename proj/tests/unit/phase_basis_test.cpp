#include <gtest/gtest.h>

#include <random>

#include "dmp/basis.hpp"
#include "dmp/phase.hpp"
#include "support/properties.hpp"

using namespace dmp;

TEST(Phase, ExponentialStartsAtOne) { EXPECT_DOUBLE_EQ(make_phase(ExponentialPhase{}, 1.0).value, 1.0); }

TEST(Phase, ExponentialMatchesClosedForm) {
  CanonicalState s = make_phase(ExponentialPhase{2.0}, 1.0);
  double worst = 0.0;
  for (int k = 1; k <= 3000; ++k) {
    s = step_phase(s, 1e-3);
    worst = std::max(worst, std::abs(s.value - std::exp(-2.0 * k * 1e-3)));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Phase, InfiniteStopFeedbackFreezesThePhase) {
  CanonicalState s = step_phase(make_phase(ExponentialPhase{}, 1.0), 0.1);
  const CanonicalState n = step_phase(s, 0.01, StopFeedback{std::numeric_limits<double>::infinity(), 1.0});
  EXPECT_EQ(n.value, s.value);
  EXPECT_DOUBLE_EQ(n.elapsed, s.elapsed + 0.01);
}

TEST(Phase, StopFeedbackSlowsTheClock) {
  const CanonicalState s = make_phase(ExponentialPhase{}, 1.0);
  const CanonicalState n = step_phase(s, 0.01, StopFeedback{1.0, 4.0});
  EXPECT_DOUBLE_EQ(n.clock, 0.01 / 5.0);
}

TEST(Phase, PiecewiseLinearClosedForm) {
  CanonicalState s = make_phase(PiecewiseLinearPhase{1.0}, 1.0);
  for (int k = 0; k < 50; ++k) s = step_phase(s, 0.01);
  EXPECT_NEAR(s.value, 0.5, 1e-12);
  for (int k = 0; k < 50; ++k) s = step_phase(s, 0.01);
  EXPECT_EQ(s.value, 0.0);
  for (int k = 0; k < 50; ++k) s = step_phase(s, 0.01);
  EXPECT_EQ(s.value, 0.0);
}

TEST(Phase, DoneThresholds) {
  CanonicalState s = make_phase(ExponentialPhase{}, 1.0);
  EXPECT_FALSE(phase_done(s, 0.01));
  s.value = 0.005;
  EXPECT_TRUE(phase_done(s, 0.01));
  CanonicalState p = make_phase(PeriodicPhase{}, 1.0);
  for (int k = 0; k < 1000; ++k) {
    p = step_phase(p, 0.01);
    ASSERT_FALSE(phase_done(p, 0.01));
  }
}

TEST(Phase, DecayingPhasesAreNonincreasingUnderFeedback) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> err(0.0, 3.0);
  for (PhaseConfig c : {PhaseConfig{ExponentialPhase{}}, PhaseConfig{SigmoidalPhase{}}, PhaseConfig{PiecewiseLinearPhase{}}}) {
    CanonicalState s = make_phase(c, 0.7);
    for (int k = 0; k < 500; ++k) {
      const CanonicalState n = step_phase(s, 0.005, StopFeedback{err(rng), 2.0});
      ASSERT_LE(n.value, s.value);
      s = n;
    }
  }
}

TEST(Phase, SigmoidIsFlatAwayFromItsDrop) {
  const SigmoidalPhase sp{};  // T = 1, steepness 40
  const double delta = std::log(999.0) / sp.steepness();
  for (double t = 0.0; t < 2.0; t += 0.001) {
    const double v = phase_value_at(sp, 1.0, t);
    if (t < sp.T - delta) {
      EXPECT_GT(v, 1.0 - 1e-3) << t;
    }
    if (t > sp.T + delta) {
      EXPECT_LT(v, 1e-3) << t;
    }
  }
}

TEST(Phase, ClosedFormProperty) { EXPECT_LT(props::phase_closed_form(), 1e-4); }

TEST(Basis, GaussianPhaseTwoKernels) {
  const KernelLayout l = default_layout(KernelKind::GaussianPhase, 2, 1.0);
  EXPECT_DOUBLE_EQ(l.centers[0], 1.0);
  EXPECT_DOUBLE_EQ(l.centers[1], std::exp(-1.0));
  const double h = 1.0 / ((std::exp(-1.0) - 1.0) * (std::exp(-1.0) - 1.0));
  EXPECT_DOUBLE_EQ(l.widths[0], h);
  EXPECT_DOUBLE_EQ(l.widths[1], h);
}

TEST(Basis, GaussianTimeCenters) {
  const KernelLayout l = default_layout(KernelKind::GaussianTime, 5);
  EXPECT_TRUE(l.centers.isApprox((VectorXd(5) << 0, 0.25, 0.5, 0.75, 1).finished()));
}

TEST(Basis, ZeroAndConstantWeights) {
  ForcingModel m = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 10), 2);
  for (double x : {1.0, 0.5, 0.1, 1e-3}) EXPECT_EQ(eval_forcing(m, x), VectorXd::Zero(2));
  m.weights.setConstant(3.5);
  for (double x : {1.0, 0.5, 0.1, 1e-3}) EXPECT_NEAR(eval_forcing(m, x)[1], 3.5 * x, 1e-12);
}

TEST(Basis, MatchesBruteForceKernelSum) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-50, 50);
  for (KernelKind kind : {KernelKind::GaussianPhase, KernelKind::GaussianTime, KernelKind::VonMises}) {
    ForcingModel m = ForcingModel::zeros(default_layout(kind, 12), 3);
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights.data()[i] = u(rng);
    m.amplitude = 0.7;
    for (double arg : {0.05, 0.3, 0.77, 0.99}) {
      VectorXd num = VectorXd::Zero(3);
      double den = 0.0;
      for (Eigen::Index i = 0; i < 12; ++i) {
        const double c = m.layout.centers[i], h = m.layout.widths[i];
        double psi = 0.0;
        if (kind == KernelKind::GaussianPhase) psi = std::exp(-h * (arg - c) * (arg - c));
        if (kind == KernelKind::GaussianTime) psi = std::exp(-(arg - c) * (arg - c) / (2 * h * h));
        if (kind == KernelKind::VonMises) psi = std::exp(h * (std::cos(arg * 6 - c) - 1));
        num += psi * m.weights.row(i).transpose();
        den += psi;
      }
      VectorXd expected = num / den;
      if (kind == KernelKind::GaussianPhase) expected *= arg;
      if (kind == KernelKind::GaussianTime) expected *= 0.4;
      if (kind == KernelKind::VonMises) expected *= 0.7;
      const VectorXd got = kind == KernelKind::GaussianTime ? eval_forcing(m, 0.4, arg)
                           : kind == KernelKind::VonMises   ? eval_forcing(m, arg * 6)
                                                            : eval_forcing(m, arg);
      EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Basis, NormalizedWeightsSumToOne) {
  const KernelLayout l = default_layout(KernelKind::GaussianPhase, 15);
  for (double x = 1.0; x > 1e-4; x *= 0.8) EXPECT_NEAR(regressor(l, x).sum(), x, 1e-12 * x);
}

TEST(Basis, VonMisesIsPeriodic) {
  ForcingModel m = ForcingModel::zeros(default_layout(KernelKind::VonMises, 20), 1);
  for (Eigen::Index i = 0; i < 20; ++i) m.weights(i, 0) = std::sin(0.3 * i) * 10;
  for (double phi = 0.0; phi < 6.3; phi += 0.1) {
    EXPECT_NEAR(eval_forcing(m, phi)[0], eval_forcing(m, phi + 2 * kPi)[0], 1e-12);
  }
}

TEST(Basis, DiscreteForcingIsBoundedByThePhase) {
  ForcingModel m = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 10), 1);
  for (Eigen::Index i = 0; i < 10; ++i) m.weights(i, 0) = (i % 2 ? -1.0 : 1.0) * (i + 1);
  const double wmax = m.weights.cwiseAbs().maxCoeff();
  for (double x = 1.0; x > 1e-6; x *= 0.7) EXPECT_LE(std::abs(eval_forcing(m, x)[0]), wmax * x + 1e-12);
}

TEST(Basis, LayoutValidation) {
  KernelLayout l = default_layout(KernelKind::GaussianPhase, 5);
  l.centers[2] = l.centers[1];
  EXPECT_THROW(l.validate(), InvalidArgument);
  EXPECT_THROW(default_layout(KernelKind::GaussianTime, 1), InvalidArgument);
  KernelLayout t = default_layout(KernelKind::GaussianTime, 4);
  t.centers[2] = t.centers[1];  // repeated junction centers are allowed for time kernels
  EXPECT_NO_THROW(t.validate());
}
