#pragma once

// Lie-group and Riemannian primitives for unit quaternions (S3), rotation
// matrices (SO(3)) and symmetric positive definite matrices (affine-invariant
// metric). Everything here is a pure function on values.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dmp/errors.hpp"

namespace dmp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

namespace detail {

// Below this angle Log/Exp switch to their Taylor expansions.
inline constexpr double kSmallAngle = 1e-8;

// sin(t)/t, accurate near zero.
inline double sinc(double t) {
  return std::abs(t) < 1e-4 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
}

// (1 - cos t)/t^2, accurate near zero.
inline double cosc(double t) {
  return std::abs(t) < 1e-4 ? 0.5 - t * t / 24.0 : (1.0 - std::cos(t)) / (t * t);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unit quaternions
// ---------------------------------------------------------------------------

/// Unit quaternion q = nu + u with nu the real part and u the imaginary part.
/// Construction re-normalizes only when the norm drifts by more than 1e-12,
/// so already-unit inputs keep their exact bits.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  UnitQuaternion(double nu, const Vec3& u) : nu_(nu), u_(u) { renormalize(); }

  UnitQuaternion(double w, double x, double y, double z) : UnitQuaternion(w, Vec3(x, y, z)) {}

  static UnitQuaternion identity() { return {}; }

  double nu() const { return nu_; }
  const Vec3& u() const { return u_; }

  Eigen::Vector4d coeffs() const { return {nu_, u_.x(), u_.y(), u_.z()}; }

  UnitQuaternion conjugate() const {
    UnitQuaternion q;
    q.nu_ = nu_;
    q.u_ = -u_;
    return q;
  }

  UnitQuaternion operator-() const {
    UnitQuaternion q;
    q.nu_ = -nu_;
    q.u_ = -u_;
    return q;
  }

  double dot(const UnitQuaternion& o) const { return nu_ * o.nu_ + u_.dot(o.u_); }

  double norm() const { return std::sqrt(nu_ * nu_ + u_.squaredNorm()); }

  bool operator==(const UnitQuaternion& o) const { return nu_ == o.nu_ && u_ == o.u_; }

 private:
  void renormalize() {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvariantViolation("quaternion with zero or non-finite norm");
    if (std::abs(n - 1.0) > 1e-12) {
      nu_ /= n;
      u_ /= n;
    }
  }

  double nu_ = 1.0;
  Vec3 u_ = Vec3::Zero();
};

/// Hamilton product q1 * q2.
inline UnitQuaternion quat_product(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double nu = a.nu() * b.nu() - a.u().dot(b.u());
  const Vec3 u = a.nu() * b.u() + b.nu() * a.u() + a.u().cross(b.u());
  return {nu, u};
}

inline UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return quat_product(a, b);
}

/// Log map S3 -> R3, arccos(nu) u/|u|. Undefined at -1.
inline Vec3 quat_log(const UnitQuaternion& q) {
  const double un = q.u().norm();
  if (un < 1e-300) {
    if (q.nu() < 0.0) throw DomainError("quaternion log undefined at -1+[0,0,0]");
    return Vec3::Zero();
  }
  // atan2 equals arccos(nu) on the unit sphere and keeps precision near +-1.
  const double angle = std::atan2(un, q.nu());
  if (angle < detail::kSmallAngle) return q.u() / q.nu();
  return angle * q.u() / un;
}

/// Exp map R3 -> S3, cos|w| + sin|w| w/|w|. Requires |w| < pi.
inline UnitQuaternion quat_exp(const Vec3& w) {
  const double n = w.norm();
  if (!(n < kPi)) throw DomainError("quaternion exp requires |w| < pi, got " + std::to_string(n));
  if (n == 0.0) return UnitQuaternion::identity();
  return {std::cos(n), detail::sinc(n) * w};
}

/// Flip q onto the hemisphere of `ref` so errors follow the shortest path.
inline UnitQuaternion align_hemisphere(const UnitQuaternion& q, const UnitQuaternion& ref) {
  return q.dot(ref) < 0.0 ? -q : q;
}

/// Orientation error 2 Log(a * conj(b)), with `b` taken on the shortest path to `a`.
inline Vec3 quat_error(const UnitQuaternion& a, const UnitQuaternion& b) {
  return 2.0 * quat_log(a * align_hemisphere(b, a).conjugate());
}

/// Angular distance 2|Log(q1 * conj(q2))|; 2 pi at the antipodal configuration.
inline double quat_distance(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  const UnitQuaternion d = q1 * q2.conjugate();
  if (d.u().norm() < 1e-300 && d.nu() < 0.0) return 2.0 * kPi;
  return 2.0 * quat_log(d).norm();
}

/// Point at fraction s along the shortest geodesic from a to b.
inline UnitQuaternion quat_slerp(const UnitQuaternion& a, const UnitQuaternion& b, double s) {
  const Vec3 w = quat_log(align_hemisphere(b, a) * a.conjugate());
  return quat_exp(s * w) * a;
}

// ---------------------------------------------------------------------------
// Rotation matrices
// ---------------------------------------------------------------------------

inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return m;
}

inline Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

/// Nearest rotation matrix in the Frobenius sense (polar factor).
inline Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

inline double orthogonality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

/// Element of SO(3). Inputs drifting beyond 1e-9 (but within 1e-6) are
/// projected back; anything further off is rejected.
class Rotation3 {
 public:
  Rotation3() = default;

  explicit Rotation3(const Mat3& m) : m_(m) {
    if (!m.allFinite()) throw InvariantViolation("rotation matrix has non-finite entries");
    const double err = std::max(orthogonality_error(m), std::abs(m.determinant() - 1.0));
    if (err > 1e-6) throw InvariantViolation("matrix is not a rotation (error " + std::to_string(err) + ")");
    if (err > 1e-12) m_ = orthonormalize(m);
  }

  static Rotation3 identity() { return {}; }

  const Mat3& matrix() const { return m_; }

  Rotation3 transpose() const {
    Rotation3 r;
    r.m_ = m_.transpose();
    return r;
  }

  bool operator==(const Rotation3& o) const { return m_ == o.m_; }

 private:
  Mat3 m_ = Mat3::Identity();
};

inline Rotation3 operator*(const Rotation3& a, const Rotation3& b) { return Rotation3(a.matrix() * b.matrix()); }

/// Rodrigues formula; exact for any w.
inline Rotation3 rot_exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  return Rotation3(Mat3::Identity() + detail::sinc(theta) * k + detail::cosc(theta) * k * k);
}

/// Log map SO(3) -> R3, theta n. Undefined at rotation angle pi.
inline Vec3 rot_log(const Rotation3& rot) {
  const Mat3& r = rot.matrix();
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 skew = 0.5 * vee(r - r.transpose());  // sin(theta) n
  if (theta < detail::kSmallAngle) return skew;
  const double s = std::sin(theta);
  if (kPi - theta > 1e-4) return theta / s * skew;

  // Near pi the skew part vanishes; recover the axis from the symmetric part.
  if (s < 1e-12) throw DomainError("rotation log undefined at angle pi");
  const Mat3 b = (r + r.transpose()) / 2.0 - c * Mat3::Identity();  // (1-c) n n^T
  Eigen::Index k = 0;
  b.diagonal().maxCoeff(&k);
  Vec3 n = b.col(k) / std::sqrt(std::max(b(k, k), 1e-300));
  n.normalize();
  if (n.dot(skew) < 0.0) n = -n;
  return theta * n;
}

/// Rotation matrix of a unit quaternion (Hamilton convention, q*p <-> R(q)R(p)).
inline Rotation3 to_rotation(const UnitQuaternion& q) {
  const double w = q.nu();
  const Vec3& u = q.u();
  const Mat3 k = hat(u);
  return Rotation3(Mat3::Identity() + 2.0 * w * k + 2.0 * k * k);
}

/// Unit quaternion (nu >= 0) of a rotation matrix.
inline UnitQuaternion to_quaternion(const Rotation3& rot) {
  const Eigen::Quaterniond e(rot.matrix());
  const UnitQuaternion q(e.w(), e.x(), e.y(), e.z());
  return q.nu() < 0.0 ? -q : q;
}

// ---------------------------------------------------------------------------
// Symmetric positive definite matrices, affine-invariant metric
// ---------------------------------------------------------------------------

namespace detail {

inline MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

/// f applied to the eigenvalues of a symmetric matrix.
template <class Fn>
MatrixXd sym_apply(const MatrixXd& a, Fn&& fn) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(a));
  if (es.info() != Eigen::Success) throw NotSpd("eigendecomposition failed");
  VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = fn(d[i]);
  return symmetrize(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}

inline bool is_symmetric(const MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace detail

/// Tangent vectors on the SPD manifold are plain symmetric matrices.
using TangentSym = MatrixXd;

/// Symmetric positive definite m x m matrix.
class SpdMatrix {
 public:
  SpdMatrix() : m_(MatrixXd::Identity(1, 1)) {}

  explicit SpdMatrix(const MatrixXd& m) : m_(m) {
    if (m.rows() == 0 || m.rows() != m.cols()) throw NotSpd("matrix is not square");
    if (!m.allFinite()) throw NotSpd("matrix has non-finite entries");
    if (!detail::is_symmetric(m, 1e-12)) throw NotSpd("matrix is not symmetric");
    if (m != m.transpose()) m_ = detail::symmetrize(m);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
      throw NotSpd("matrix has a non-positive eigenvalue");
    }
  }

  static SpdMatrix identity(Eigen::Index m) { return SpdMatrix(MatrixXd::Identity(m, m)); }

  const MatrixXd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  double min_eigenvalue() const {
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(m_, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  }

  bool operator==(const SpdMatrix& o) const { return m_ == o.m_; }

 private:
  MatrixXd m_;
};

namespace detail {

inline void check_dims(const SpdMatrix& a, const MatrixXd& b, const char* what) {
  if (a.dim() != b.rows() || b.rows() != b.cols()) throw DimensionMismatch(what);
}

inline MatrixXd sqrtm(const MatrixXd& a) {
  return sym_apply(a, [](double l) { return std::sqrt(l); });
}
inline MatrixXd inv_sqrtm(const MatrixXd& a) {
  return sym_apply(a, [](double l) { return 1.0 / std::sqrt(l); });
}
inline MatrixXd logm(const MatrixXd& a) {
  return sym_apply(a, [](double l) { return std::log(l); });
}
inline MatrixXd expm(const MatrixXd& a) {
  return sym_apply(a, [](double l) { return std::exp(l); });
}

}  // namespace detail

/// Log_base(target) = B^1/2 logm(B^-1/2 T B^-1/2) B^1/2.
inline TangentSym spd_log(const SpdMatrix& base, const SpdMatrix& target) {
  detail::check_dims(base, target.matrix(), "spd_log dimensions differ");
  const MatrixXd s = detail::sqrtm(base.matrix());
  const MatrixXd si = detail::inv_sqrtm(base.matrix());
  return detail::symmetrize(s * detail::logm(si * target.matrix() * si) * s);
}

/// Exp_base(delta) = B^1/2 expm(B^-1/2 D B^-1/2) B^1/2.
inline SpdMatrix spd_exp(const SpdMatrix& base, const TangentSym& delta) {
  detail::check_dims(base, delta, "spd_exp dimensions differ");
  const MatrixXd s = detail::sqrtm(base.matrix());
  const MatrixXd si = detail::inv_sqrtm(base.matrix());
  return SpdMatrix(detail::symmetrize(s * detail::expm(si * delta * si) * s));
}

/// Parallel transport along the geodesic from -> to: E D E^T with E = (to from^-1)^1/2.
inline TangentSym spd_transport(const SpdMatrix& from, const SpdMatrix& to, const TangentSym& delta) {
  detail::check_dims(from, to.matrix(), "spd_transport base dimensions differ");
  detail::check_dims(from, delta, "spd_transport tangent dimension differs");
  if (from == to) return delta;
  const MatrixXd fs = detail::sqrtm(from.matrix());
  const MatrixXd fsi = detail::inv_sqrtm(from.matrix());
  const MatrixXd e = fs * detail::sqrtm(fsi * to.matrix() * fsi) * fsi;
  return detail::symmetrize(e * delta * e.transpose());
}

/// Riemannian norm of a tangent vector at `base`.
inline double spd_norm(const SpdMatrix& base, const TangentSym& delta) {
  detail::check_dims(base, delta, "spd_norm dimensions differ");
  const MatrixXd si = detail::inv_sqrtm(base.matrix());
  return (si * delta * si).norm();
}

/// Affine-invariant geodesic distance.
inline double spd_distance(const SpdMatrix& a, const SpdMatrix& b) {
  detail::check_dims(a, b.matrix(), "spd_distance dimensions differ");
  const MatrixXd si = detail::inv_sqrtm(a.matrix());
  return detail::logm(si * b.matrix() * si).norm();
}

/// Point at fraction s along the geodesic from a to b.
inline SpdMatrix spd_geodesic(const SpdMatrix& a, const SpdMatrix& b, double s) {
  return spd_exp(a, s * spd_log(a, b));
}

// ---------------------------------------------------------------------------
// Mandel vectorization: diagonal first, then sqrt(2) * upper triangle row-major.
// ---------------------------------------------------------------------------

inline Eigen::Index mandel_size(Eigen::Index m) { return m * (m + 1) / 2; }

/// Matrix dimension m for a Mandel vector of length n, or throws.
inline Eigen::Index mandel_dim(Eigen::Index n) {
  for (Eigen::Index m = 1; mandel_size(m) <= n; ++m) {
    if (mandel_size(m) == n) return m;
  }
  throw DimensionMismatch("length " + std::to_string(n) + " is not m(m+1)/2");
}

inline VectorXd mandel_vec(const MatrixXd& s) {
  if (s.rows() != s.cols()) throw DimensionMismatch("mandel_vec needs a square matrix");
  const Eigen::Index m = s.rows();
  VectorXd v(mandel_size(m));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m; ++i) v[k++] = s(i, i);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) v[k++] = std::numbers::sqrt2 * s(i, j);
  }
  return v;
}

inline MatrixXd mandel_mat(const VectorXd& v) {
  const Eigen::Index m = mandel_dim(v.size());
  MatrixXd s(m, m);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m; ++i) s(i, i) = v[k++];
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) s(i, j) = s(j, i) = v[k++] / std::numbers::sqrt2;
  }
  return s;
}

}  // namespace dmp
