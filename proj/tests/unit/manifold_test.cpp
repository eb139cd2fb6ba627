#include <gtest/gtest.h>

#include <random>

#include "dmp/manifold.hpp"
#include "support/properties.hpp"

using namespace dmp;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 r(42);
  return r;
}

Vec3 random_vec(double max_norm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), n(0.0, max_norm);
  return Vec3(u(rng()), u(rng()), u(rng())).normalized() * n(rng());
}

UnitQuaternion random_quat() { return quat_exp(random_vec(0.99 * kPi)); }

SpdMatrix random_spd(Eigen::Index m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng());
  return SpdMatrix(a * a.transpose() + 0.3 * MatrixXd::Identity(m, m));
}

MatrixXd random_sym(Eigen::Index m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng());
  return 0.5 * (a + a.transpose());
}

Mat3 rz(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

}  // namespace

TEST(Quaternion, IdentityIsNeutral) {
  const UnitQuaternion q = random_quat();
  EXPECT_EQ(UnitQuaternion::identity() * q, q);
}

TEST(Quaternion, IJEqualsK) {
  const UnitQuaternion i(0, 1, 0, 0), j(0, 0, 1, 0);
  const UnitQuaternion k = i * j;
  EXPECT_DOUBLE_EQ(k.nu(), 0.0);
  EXPECT_TRUE(k.u().isApprox(Vec3(0, 0, 1)));
}

TEST(Quaternion, ProductKeepsUnitNorm) {
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const UnitQuaternion a = random_quat(), b = random_quat();
    const Eigen::Vector4d p = quat_product(a, b).coeffs();
    worst = std::max(worst, std::abs(p.norm() - 1.0));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Quaternion, LogAndExpSpecialValues) {
  EXPECT_EQ(quat_log(UnitQuaternion::identity()), Vec3::Zero());
  EXPECT_TRUE(quat_log(UnitQuaternion(0, 1, 0, 0)).isApprox(Vec3(kPi / 2, 0, 0)));
  EXPECT_EQ(quat_exp(Vec3::Zero()), UnitQuaternion::identity());
  const UnitQuaternion q = quat_exp(Vec3(kPi / 2, 0, 0));
  EXPECT_NEAR(q.nu(), 0.0, 1e-15);
  EXPECT_NEAR(q.u().x(), 1.0, 1e-15);
}

TEST(Quaternion, ExpLogRoundtrips) {
  for (int n = 0; n < 500; ++n) {
    const Vec3 w = random_vec(0.999 * kPi);
    EXPECT_LT((quat_log(quat_exp(w)) - w).norm(), 1e-8);
    const UnitQuaternion q = random_quat();
    EXPECT_LT((quat_exp(quat_log(q)).coeffs() - q.coeffs()).norm(), 1e-8);
  }
}

TEST(Quaternion, TinyAnglesUseTheSeriesBranch) {
  const Vec3 w(1e-10, -2e-10, 3e-10);
  EXPECT_LT((quat_log(quat_exp(w)) - w).norm(), 1e-20);
}

TEST(Quaternion, ExpRejectsOutOfRangeArguments) { EXPECT_THROW(quat_exp(Vec3(4.0, 0, 0)), DomainError); }

TEST(Quaternion, DistanceSpecialValuesAndSymmetry) {
  const UnitQuaternion q = random_quat();
  EXPECT_NEAR(quat_distance(q, q), 0.0, 1e-12);
  EXPECT_NEAR(quat_distance(UnitQuaternion::identity(), UnitQuaternion(0, 1, 0, 0)), kPi, 1e-12);
  for (int n = 0; n < 200; ++n) {
    const UnitQuaternion a = random_quat(), b = random_quat();
    EXPECT_NEAR(quat_distance(a, b), quat_distance(b, a), 1e-12);
  }
}

TEST(Quaternion, ConstructorRenormalizesOnlyDriftedInput) {
  const UnitQuaternion q = random_quat();
  const UnitQuaternion copy(q.nu(), q.u());
  EXPECT_EQ(copy, q);
  const UnitQuaternion scaled(2.0, 0.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(scaled.nu(), 1.0);
  EXPECT_THROW(UnitQuaternion(0, 0, 0, 0), InvariantViolation);
}

TEST(Rotation, LogSpecialValues) {
  EXPECT_EQ(rot_log(Rotation3::identity()), Vec3::Zero());
  EXPECT_TRUE(rot_log(Rotation3(rz(kPi / 3))).isApprox(Vec3(0, 0, kPi / 3), 1e-12));
}

TEST(Rotation, ExpMatchesAnalyticRotation) {
  EXPECT_EQ(rot_exp(Vec3::Zero()).matrix(), Mat3::Identity());
  EXPECT_LT((rot_exp(Vec3(0, 0, kPi / 2)).matrix() - rz(kPi / 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rotation, ExpLogRoundtripAndDeterminant) {
  for (int n = 0; n < 500; ++n) {
    const Vec3 w = random_vec(0.999 * kPi);
    const Rotation3 r = rot_exp(w);
    EXPECT_LT((rot_log(r) - w).norm(), 1e-8);
    EXPECT_NEAR(r.matrix().determinant(), 1.0, 1e-9);
    EXPECT_LT(orthogonality_error(r.matrix()), 1e-12);
  }
}

TEST(Rotation, LogNearPiIsStable) {
  const Vec3 w = Vec3(1, 2, -1).normalized() * (kPi - 1e-7);
  EXPECT_LT((rot_log(rot_exp(w)) - w).norm(), 1e-6);
}

TEST(Rotation, QuaternionConversionsAgree) {
  for (int n = 0; n < 200; ++n) {
    const Vec3 w = random_vec(0.99 * kPi);
    EXPECT_LT((to_rotation(quat_exp(0.5 * w)).matrix() - rot_exp(w).matrix()).cwiseAbs().maxCoeff(), 1e-12);
    const UnitQuaternion q = to_quaternion(rot_exp(w));
    EXPECT_LT(quat_distance(q, quat_exp(0.5 * w)), 1e-7);
  }
}

TEST(Rotation, RejectsNonRotations) {
  EXPECT_THROW(Rotation3(2.0 * Mat3::Identity()), InvariantViolation);
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  EXPECT_THROW(Rotation3{reflect}, InvariantViolation);
}

TEST(Spd, LogAndExpSpecialValues) {
  const SpdMatrix x = random_spd(3);
  EXPECT_LT(spd_log(x, x).cwiseAbs().maxCoeff(), 1e-12);
  const SpdMatrix i2 = SpdMatrix::identity(2);
  const SpdMatrix de((Eigen::Matrix2d() << std::exp(1.0), 0, 0, 1).finished());
  EXPECT_LT((spd_log(i2, de) - (Eigen::Matrix2d() << 1, 0, 0, 0).finished()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((spd_exp(x, MatrixXd::Zero(3, 3)).matrix() - x.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((spd_exp(i2, (Eigen::Matrix2d() << 1, 0, 0, 0).finished()).matrix() - de.matrix()).cwiseAbs().maxCoeff(),
            1e-14);
}

TEST(Spd, ExpLogRoundtripAndPositivity) {
  for (int n = 0; n < 200; ++n) {
    const SpdMatrix x = random_spd(3), y = random_spd(3);
    EXPECT_LT((spd_exp(x, spd_log(x, y)).matrix() - y.matrix()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_GT(spd_exp(x, 3.0 * random_sym(3)).min_eigenvalue(), 0.0);
  }
}

TEST(Spd, TransportIsIdentityOnTheSamePointAndPreservesNorm) {
  const SpdMatrix x = random_spd(3), y = random_spd(3);
  const MatrixXd d = random_sym(3);
  EXPECT_LT((spd_transport(x, x, d) - d).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(spd_transport(SpdMatrix::identity(3), y, MatrixXd::Zero(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
  for (int n = 0; n < 100; ++n) {
    const SpdMatrix a = random_spd(3), b = random_spd(3);
    const MatrixXd delta = random_sym(3);
    EXPECT_NEAR(spd_norm(a, delta), spd_norm(b, spd_transport(a, b, delta)), 1e-8);
  }
}

TEST(Spd, DistanceIsSymmetricAndAffineInvariant) {
  const SpdMatrix a = random_spd(2), b = random_spd(2);
  EXPECT_NEAR(spd_distance(a, b), spd_distance(b, a), 1e-12);
  const MatrixXd g = (Eigen::Matrix2d() << 2.0, 0.3, -0.1, 1.5).finished();
  const SpdMatrix ga(g * a.matrix() * g.transpose()), gb(g * b.matrix() * g.transpose());
  EXPECT_NEAR(spd_distance(ga, gb), spd_distance(a, b), 1e-10);
}

TEST(Spd, RejectsIndefiniteOrAsymmetricInput) {
  EXPECT_THROW(SpdMatrix((Eigen::Matrix2d() << 1, 0, 0, -1).finished()), NotSpd);
  EXPECT_THROW(SpdMatrix((Eigen::Matrix2d() << 1, 0.5, 0, 1).finished()), NotSpd);
}

TEST(Mandel, TwoByTwoLayout) {
  const MatrixXd s = (Eigen::Matrix2d() << 1.0, 2.0, 2.0, 3.0).finished();
  const VectorXd v = mandel_vec(s);
  ASSERT_EQ(v.size(), 3);
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_DOUBLE_EQ(v[1], 3.0);
  EXPECT_DOUBLE_EQ(v[2], std::sqrt(2.0) * 2.0);
}

TEST(Mandel, InverseAndIsometry) {
  for (Eigen::Index m = 1; m <= 4; ++m) {
    const MatrixXd s = random_sym(m);
    EXPECT_LT((mandel_mat(mandel_vec(s)) - s).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(mandel_vec(s).norm(), s.norm(), 1e-13);
  }
}

TEST(ManifoldProperty, RoundtripsBelowTolerance) { EXPECT_LT(props::manifold_roundtrip(), 1e-8); }
