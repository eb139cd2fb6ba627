#include <gtest/gtest.h>

#include <random>

#include "dmp/demos.hpp"
#include "dmp/geometric.hpp"
#include "dmp/periodic.hpp"
#include "dmp/scenarios.hpp"

using namespace dmp;

namespace {

PeriodicDmp trained_cosine(double amplitude = 1.0) {
  PeriodicTrainOptions o;
  o.amplitude = amplitude;
  return train_periodic(noisy_cosine_demo(2.0, 0.01, 1e-9, 1), 2.0 * kPi, o);
}

double steady_rmse(const Trajectory<VectorXd>& r, double from, double omega) {
  double se = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r.times[k] < from - 1e-9) continue;
    const double e = r.samples[k][0] - std::cos(omega * r.times[k]);
    se += e * e;
    ++n;
  }
  return std::sqrt(se / n);
}

}  // namespace

TEST(Periodic, LearnsTheNoisyCosine) {
  const auto r = scenarios::fig6();
  EXPECT_LT(r.metrics.at("steady_rmse"), 5e-2);
  EXPECT_EQ(r.model.forcing.layout.kind, KernelKind::VonMises);
}

TEST(Periodic, KernelwiseRegressionAlsoConverges) {
  PeriodicTrainOptions o;
  o.method = PeriodicFit::Kernelwise;
  o.passes = 20;
  const PeriodicDmp d = train_periodic(noisy_cosine_demo(2.0, 0.01, 1e-9, 1), 2.0 * kPi, o);
  PeriodicRolloutOptions ro;
  ro.duration = 4.0;
  EXPECT_LT(steady_rmse(rollout(d, ro), 3.0, 2.0 * kPi), 5e-2);
}

TEST(Periodic, ZeroAmplitudeSettlesAtTheAnchor) {
  PeriodicDmp d = trained_cosine();
  d.forcing.amplitude = 0.0;
  PeriodicRolloutOptions ro;
  ro.duration = 5.0;
  EXPECT_LT((rollout(d, ro).samples.back() - d.anchor).norm(), 1e-6);
}

TEST(Periodic, AmplitudeScalesTheOscillation) {
  PeriodicDmp a = trained_cosine();
  PeriodicDmp b = a;
  b.forcing.amplitude = 2.0 * a.forcing.amplitude;
  b.y0 = 2.0 * a.y0;
  PeriodicRolloutOptions ro;
  ro.duration = 3.0;
  const auto ra = rollout(a, ro), rb = rollout(b, ro);
  for (std::size_t k = 0; k < ra.size(); ++k) {
    ASSERT_NEAR(rb.samples[k][0] - b.anchor[0], 2.0 * (ra.samples[k][0] - a.anchor[0]), 1e-12);
  }
}

TEST(Periodic, DoublingTheFrequencyHalvesTheTime) {
  PeriodicDmp a = trained_cosine();
  PeriodicDmp b = a;
  b.omega = 2.0 * a.omega;
  PeriodicRolloutOptions oa, ob;
  oa.dt = 0.01;
  oa.duration = 3.0;
  ob.dt = 0.005;
  ob.duration = 1.5;
  const auto ra = rollout(a, oa), rb = rollout(b, ob);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) ASSERT_NEAR(ra.samples[k][0], rb.samples[k][0], 1e-9);
}

TEST(Periodic, RejectsShortDemosAndBadModels) {
  EXPECT_THROW(train_periodic(noisy_cosine_demo(0.5, 0.01, 1e-9, 1), 2.0 * kPi), DegenerateDemo);
  PeriodicDmp d = trained_cosine();
  d.omega = 0.0;
  EXPECT_THROW(d.validate(), InvalidArgument);
  d = trained_cosine();
  d.forcing = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 5), 1);
  EXPECT_THROW(d.validate(), InvalidArgument);
}

TEST(QuaternionDmp, StaysOnTheSphereAndReachesTheGoal) {
  const auto r = scenarios::fig4();
  EXPECT_LT(r.metrics.at("max_norm_error"), 1e-9);
  EXPECT_LT(r.metrics.at("terminal_distance"), 1e-2);
  EXPECT_LT(r.metrics.at("max_tracking_error"), 5e-2);
}

TEST(RotationDmp, StaysOrthonormalAndReachesTheGoal) {
  const auto r = scenarios::fig5();
  EXPECT_LT(r.metrics.at("max_orthogonality_error"), 1e-9);
  EXPECT_LT(r.metrics.at("max_det_error"), 1e-9);
  EXPECT_LT(r.metrics.at("terminal_distance"), 1e-2);
}

TEST(RotationDmp, AgreesWithTheQuaternionForm) {
  const auto q = scenarios::fig4();
  const auto r = scenarios::fig5();
  ASSERT_EQ(q.rollout.size(), r.rollout.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < q.rollout.size(); ++k) {
    const Mat3 d = to_rotation(q.rollout.samples[k]).matrix() * r.rollout.samples[k].matrix().transpose();
    worst = std::max(worst, rot_log(Rotation3(d)).norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(SpdDmp, StaysPositiveDefiniteAndReachesTheGoal) {
  const auto r = scenarios::fig7();
  EXPECT_GT(r.metrics.at("min_eigenvalue"), 0.0);
  EXPECT_LT(r.metrics.at("terminal_distance"), 1e-2);
  for (const auto& x : r.rollout.samples) ASSERT_LT((x.matrix() - x.matrix().transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

// On 1x1 matrices u = x1 log(x / x1) turns the SPD system into the classical one.
TEST(SpdDmp, ScalarCaseIsAClassicalDmpInLogCoordinates) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> w(-50.0, 50.0);
  SpdDmp s;
  s.x1 = SpdMatrix(MatrixXd::Constant(1, 1, 2.0));
  s.goal = SpdMatrix(MatrixXd::Constant(1, 1, 0.7));
  s.gains.tau = 1.3;
  s.forcing = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 10), 1);
  for (Eigen::Index i = 0; i < 10; ++i) s.forcing.weights(i, 0) = w(rng);
  DiscreteDmp c;
  c.gains = s.gains;
  c.y0 = VectorXd::Zero(1);
  c.goal = VectorXd::Constant(1, 2.0 * std::log(0.7 / 2.0));
  c.forcing = s.forcing;
  SpdRolloutOptions so;
  RolloutOptions co;
  so.dt = co.dt = 0.005;
  so.duration = co.duration = 3.0;
  const auto rs = rollout(s, so);
  const auto rc = rollout(c, co);
  ASSERT_EQ(rs.size(), rc.size());
  for (std::size_t k = 0; k < rs.size(); ++k) {
    ASSERT_NEAR(2.0 * std::log(rs.samples[k].matrix()(0, 0) / 2.0), rc.samples[k][0], 1e-10) << k;
  }
}

TEST(QuaternionDmp, GoalSwitchMovesMonotonicallyAlongTheGeodesic) {
  const auto r = scenarios::fig4();
  QuaternionState s = initial_state(r.model);
  const UnitQuaternion g_new = quat_exp(Vec3(-0.3, 0.2, 0.1));
  double last = quat_distance(s.goal, g_new);
  const double total = last;
  for (int k = 0; k < 300; ++k) {
    s = goal_switch_step(s, g_new, 10.0, 0.01);
    const double d = quat_distance(s.goal, g_new);
    ASSERT_LT(d, last);
    ASSERT_NEAR(quat_distance(r.model.goal, s.goal) + d, total, 1e-9);
    last = d;
  }
}

TEST(QuaternionDmp, RolloutWithGoalSwitchReachesTheNewGoal) {
  const auto r = scenarios::fig4();
  QuaternionRolloutOptions o;
  o.duration = 20.0;
  const UnitQuaternion g_new = quat_exp(Vec3(-0.3, 0.2, 0.1));
  o.goal_switch = GoalSwitch<UnitQuaternion>{3.0, g_new, 10.0};
  EXPECT_LT(quat_distance(rollout(r.model, o).samples.back(), g_new), 1e-2);
}

TEST(RotationDmp, LargeStepsStayOnTheGroup) {
  RotationDmp d;
  d.r0 = Rotation3::identity();
  d.goal = rot_exp(Vec3(0.0, 0.0, 3.0));
  d.forcing = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 5), 3);
  d.gains.tau = 0.2;
  RotationRolloutOptions o;
  o.dt = 0.02;
  o.duration = 2.0;
  for (const auto& r : rollout(d, o).samples) ASSERT_LT(orthogonality_error(r.matrix()), 1e-9);
}

TEST(GeometricDmp, ValidationErrors) {
  QuaternionDmp q = scenarios::fig4().model;
  q.forcing = ForcingModel::zeros(default_layout(KernelKind::GaussianPhase, 5), 2);
  EXPECT_THROW(q.validate(), DimensionMismatch);
  q = scenarios::fig4().model;
  q.variant = Variant::Pastor;
  EXPECT_THROW(q.validate(), InvalidArgument);
  TrainOptions o;
  o.variant = Variant::ScaleInvariant;
  EXPECT_THROW(train_spd(min_jerk_demo(scenarios::fig7_start(), scenarios::fig7_goal(), 1.0, 0.01), o),
               InvalidArgument);
}
