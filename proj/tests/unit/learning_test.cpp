#include <gtest/gtest.h>

#include <random>

#include "dmp/demos.hpp"
#include "dmp/discrete.hpp"
#include "dmp/learning.hpp"
#include "support/properties.hpp"

using namespace dmp;

namespace {

VectorXd exp_phases(Eigen::Index n, double dt) {
  VectorXd x(n);
  for (Eigen::Index t = 0; t < n; ++t) x[t] = std::exp(-std::log(1000.0) * t * dt);
  return x;
}

MatrixXd random_weights(Eigen::Index n, Eigen::Index j, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-20, 20);
  MatrixXd w(n, j);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  return w;
}

}  // namespace

TEST(BatchFit, RecoversWeightsThatGeneratedTheTargets) {
  const KernelLayout l = default_layout(KernelKind::GaussianPhase, 10);
  const VectorXd x = exp_phases(101, 0.01);
  const MatrixXd w = random_weights(10, 3, 1);
  const BatchFit fit = batch_fit(l, x, design_matrix(l, x) * w);
  EXPECT_LT((fit.model.weights - w).norm() / w.norm(), 1e-8);
  EXPECT_LT(fit.residual_rms.maxCoeff(), 1e-10);
}

TEST(BatchFit, ZeroTargetsGiveZeroWeights) {
  const KernelLayout l = default_layout(KernelKind::GaussianPhase, 8);
  const BatchFit fit = batch_fit(l, exp_phases(50, 0.02), MatrixXd::Zero(50, 2));
  EXPECT_EQ(fit.model.weights, MatrixXd::Zero(8, 2));
}

TEST(BatchFit, TimeKernelsNeedFractions) {
  const KernelLayout l = default_layout(KernelKind::GaussianTime, 6);
  const VectorXd x = exp_phases(40, 0.025);
  FitOptions o;
  o.elapsed_fracs = VectorXd::LinSpaced(40, 0.0, 1.0);
  const MatrixXd w = random_weights(6, 1, 2);
  const BatchFit fit = batch_fit(l, x, design_matrix(l, x, o.elapsed_fracs) * w, o);
  EXPECT_LT((fit.model.weights - w).norm() / w.norm(), 1e-8);
}

TEST(BatchFit, RejectsBadInput) {
  const KernelLayout l = default_layout(KernelKind::GaussianPhase, 10);
  EXPECT_THROW(batch_fit(l, exp_phases(5, 0.2), MatrixXd::Zero(5, 1)), InvalidArgument);
  EXPECT_THROW(batch_fit(l, exp_phases(20, 0.05), MatrixXd::Zero(19, 1)), DimensionMismatch);
  MatrixXd f = MatrixXd::Zero(20, 1);
  f(3, 0) = std::nan("");
  EXPECT_THROW(batch_fit(l, exp_phases(20, 0.05), f), InvalidArgument);
}

TEST(RecursiveFit, MatchesRidgeBatchFitWithTheSamePrior) { EXPECT_LT(props::batch_vs_recursive(), 1e-6); }

TEST(RecursiveFit, RepeatedPassesShrinkTheRidge) {
  const KernelLayout l = default_layout(KernelKind::GaussianPhase, 10);
  const VectorXd x = exp_phases(101, 0.01);
  const MatrixXd f = design_matrix(l, x) * random_weights(10, 2, 3);
  RecursiveLearner rls = RecursiveLearner::make(10, 2);
  for (int pass = 1; pass <= 4; ++pass) {
    for (Eigen::Index t = 0; t < x.size(); ++t) rls = recursive_fit_step(rls, regressor(l, x[t]), f.row(t).transpose());
    FitOptions o;
    o.ridge = 1.0 / pass;
    const MatrixXd wr = batch_fit(l, x, f, o).model.weights;
    EXPECT_LT((rls.w - wr).norm() / wr.norm(), 1e-9) << pass;
  }
}

TEST(RecursiveFit, ForgettingTracksChangedWeights) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  const MatrixXd w1 = random_weights(4, 1, 5), w2 = random_weights(4, 1, 6);
  RecursiveLearner forget = RecursiveLearner::make(4, 1, 0.99, 1e3);
  RecursiveLearner keep = RecursiveLearner::make(4, 1, 1.0, 1e3);
  const int steps = 2000;
  // Exponentially weighted least squares with the decayed prior, solved directly.
  MatrixXd a = std::pow(0.99, steps) / 1e3 * MatrixXd::Identity(4, 4);
  VectorXd b = VectorXd::Zero(4);
  for (int t = 0; t < steps; ++t) {
    VectorXd phi(4);
    for (Eigen::Index i = 0; i < 4; ++i) phi[i] = n(rng);
    const VectorXd f = (t < steps / 2 ? w1 : w2).transpose() * phi;
    forget = recursive_fit_step(forget, phi, f);
    keep = recursive_fit_step(keep, phi, f);
    const double weight = std::pow(0.99, steps - 1 - t);
    a += weight * phi * phi.transpose();
    b += weight * phi * f[0];
  }
  const VectorXd expected = a.ldlt().solve(b);
  EXPECT_LT((forget.w.col(0) - expected).norm() / expected.norm(), 1e-8);
  EXPECT_LT((forget.w - w2).norm(), 1e-2);
  EXPECT_GT((keep.w - w2).norm(), 1.0);
}

TEST(RecursiveFit, RejectsBadParameters) {
  EXPECT_THROW(RecursiveLearner::make(4, 1, 0.0), InvalidArgument);
  EXPECT_THROW(RecursiveLearner::make(4, 1, 1.1), InvalidArgument);
  EXPECT_THROW(RecursiveLearner::make(4, 1, 1.0, -1.0), InvalidArgument);
  EXPECT_THROW(recursive_fit_step(RecursiveLearner::make(4, 1), VectorXd::Zero(3), VectorXd::Zero(1)),
               DimensionMismatch);
}

TEST(KernelwiseFit, ConvergesToAConstantTarget) {
  KernelwiseLearner s = KernelwiseLearner::make(3, 1, 1.0, 2.0);
  const VectorXd psi = (VectorXd(3) << 1.0, 0.5, 0.0).finished();
  for (int k = 0; k < 500; ++k) s = kernelwise_fit_step(s, psi, VectorXd::Constant(1, 4.0));
  EXPECT_NEAR(s.w(0, 0), 2.0, 1e-2);
  EXPECT_NEAR(s.w(1, 0), 2.0, 1e-2);
  EXPECT_EQ(s.w(2, 0), 0.0);
  EXPECT_EQ(s.P[2], 1.0);
}

TEST(FeedbackAdapt, ZeroFeedbackLeavesWeightsUnchanged) {
  KernelwiseLearner s = KernelwiseLearner::make(5, 2);
  s.w = random_weights(5, 2, 7);
  const VectorXd psi = VectorXd::LinSpaced(5, 0.1, 1.0);
  EXPECT_EQ(feedback_adapt_step(s, psi, 0.0).w, s.w);
}

TEST(FeedbackAdapt, PositiveFeedbackRaisesActiveWeights) {
  KernelwiseLearner s = KernelwiseLearner::make(5, 1);
  VectorXd psi = VectorXd::LinSpaced(5, 0.0, 1.0);
  const KernelwiseLearner n = feedback_adapt_step(s, psi, 0.5);
  EXPECT_EQ(n.w(0, 0), 0.0);
  for (Eigen::Index i = 1; i < 5; ++i) EXPECT_GT(n.w(i, 0), s.w(i, 0));
}

TEST(Derivatives, RampOnANonuniformGrid) {
  Demonstration<VectorXd> d;
  for (double t : {0.0, 0.1, 0.15, 0.4, 0.41, 0.7, 1.0}) {
    d.times.push_back(t);
    d.samples.push_back(VectorXd::Constant(1, 3.0 * t - 1.0));
  }
  const auto e = estimate_derivatives(d);
  EXPECT_LT((e.velocity.array() - 3.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(e.acceleration.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Derivatives, SineAtOneKilohertz) {
  Demonstration<VectorXd> d;
  for (int k = 0; k <= 2000; ++k) {
    const double t = k * 1e-3;
    d.times.push_back(t);
    d.samples.push_back(VectorXd::Constant(1, std::sin(2 * kPi * t)));
  }
  const auto e = estimate_derivatives(d);
  double vel = 0.0, acc = 0.0;
  for (int k = 2; k <= 1998; ++k) {  // interior; one-sided stencils at the ends are checked below
    const double t = k * 1e-3;
    vel = std::max(vel, std::abs(e.velocity(k, 0) - 2 * kPi * std::cos(2 * kPi * t)));
    acc = std::max(acc, std::abs(e.acceleration(k, 0) + 4 * kPi * kPi * std::sin(2 * kPi * t)));
  }
  EXPECT_LT(vel, 1e-4);
  EXPECT_LT(acc, 1e-3);
  EXPECT_NEAR(e.velocity(0, 0), 2 * kPi, 1e-3);
  EXPECT_NEAR(e.acceleration(0, 0), 0.0, 0.3);
}

TEST(Derivatives, ConstantQuaternionHasZeroVelocity) {
  Demonstration<UnitQuaternion> d;
  const UnitQuaternion q = quat_exp(Vec3(0.2, -0.4, 0.1));
  for (int k = 0; k < 10; ++k) {
    d.times.push_back(0.1 * k);
    d.samples.push_back(k % 2 ? UnitQuaternion(-q.nu(), -q.u()) : q);  // antipodal copies are the same rotation
  }
  const auto e = estimate_derivatives(d);
  EXPECT_LT(e.velocity.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Derivatives, RejectsDegenerateDemos) {
  Demonstration<VectorXd> d;
  d.times = {0.0, 0.1};
  d.samples = {VectorXd::Zero(1), VectorXd::Zero(1)};
  EXPECT_THROW(estimate_derivatives(d), DegenerateDemo);
  d.times = {0.0, 0.1, 0.1};
  d.samples.push_back(VectorXd::Zero(1));
  EXPECT_THROW(estimate_derivatives(d), DegenerateDemo);
}

TEST(ForcingTarget, IsZeroForAMotionAtRest) {
  Demonstration<VectorXd> d;
  const VectorXd p = (VectorXd(2) << 0.3, -1.0).finished();
  for (int k = 0; k < 20; ++k) {
    d.times.push_back(0.05 * k);
    d.samples.push_back(p);
  }
  DiscreteDmp skel;
  skel.y0 = p;
  skel.goal = p;
  skel.forcing = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 5), 2);
  skel.gains.tau = d.duration();
  EXPECT_LT(forcing_target(skel, d).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ForcingTarget, MinimumJerkMatchesAnalyticAcceleration) {
  const auto demo = min_jerk_demo(VectorXd::Zero(1), VectorXd::Ones(1), 1.0, 0.01);
  DiscreteDmp skel;
  skel.y0 = VectorXd::Zero(1);
  skel.goal = VectorXd::Ones(1);
  skel.forcing = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 5), 1);
  const MatrixXd f = forcing_target(skel, demo);
  for (std::size_t t = 0; t < demo.size(); ++t) {
    const double u = demo.times[t];
    const double expected = min_jerk_d2(u) - 25.0 * (6.25 * (1.0 - min_jerk(u)) - min_jerk_d1(u));
    ASSERT_NEAR(f(static_cast<Eigen::Index>(t), 0), expected, 1e-9) << u;
  }
}
