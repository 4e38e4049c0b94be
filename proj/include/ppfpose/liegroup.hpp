#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ppfpose {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Orthogonality tolerance used both for validation and as the trigger for
/// re-orthonormalization after integration.
inline constexpr double kOrthogonalityTolerance = 1e-9;

/// Below this angle so3_exp switches to its Taylor expansion.
inline constexpr double kExpSeriesThreshold = 1e-8;

/// Frobenius norm of R^T R - I.
double orthogonality_defect(const Mat3& m);

/// Element of SO(3) stored as a full 3x3 matrix.
///
/// Construction from an arbitrary matrix goes through one of the named
/// factories so that the orthogonality / determinant invariant is either
/// checked or established explicitly.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}

  /// Throws InvalidInput unless |R^T R - I|_F <= 1e-9 and |det R - 1| <= 1e-9.
  static RotationMatrix from_matrix(const Mat3& m);

  /// Nearest rotation in the Frobenius sense (SVD polar factor).
  static RotationMatrix project(const Mat3& m);

  /// Keeps `m` bit-for-bit when its defect is within tolerance, otherwise
  /// projects. Used after every integration step.
  static RotationMatrix renormalized(const Mat3& m);

  static RotationMatrix identity() { return RotationMatrix(); }

  const Mat3& matrix() const { return m_; }
  RotationMatrix transpose() const { return RotationMatrix(m_.transpose(), Unchecked{}); }

  RotationMatrix operator*(const RotationMatrix& o) const {
    return renormalized(m_ * o.m_);
  }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  bool operator==(const RotationMatrix& o) const { return m_ == o.m_; }

 private:
  struct Unchecked {};
  RotationMatrix(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

/// Homogeneous transform [R p; 0 1].
struct Pose {
  RotationMatrix r;
  Vec3 p = Vec3::Zero();

  static Pose identity() { return Pose{}; }
  static Pose from_matrix(const Mat4& t);
  Mat4 matrix() const;

  bool operator==(const Pose& o) const { return r == o.r && p == o.p; }
};

/// Body-frame group velocity (angular, translational).
struct Twist {
  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

Mat3 skew(const Vec3& b);

/// Inverse of skew. Throws NotAntisymmetric when |m + m^T|_F > 1e-9.
Vec3 vex(const Mat3& m);

Mat4 wedge(const Twist& y);

/// Anti-symmetric projection (m - m^T) / 2.
Mat3 pa(const Mat3& m);

/// Normalized Euclidean distance (1/4) tr(I - R), in [0, 1].
double dist_so3(const RotationMatrix& r);

RotationMatrix so3_exp(const Vec3& phi);

/// Rotation from Rodrigues (Gibbs) parameters:
///   R = ((1 - |rho|^2) I + 2 rho rho^T + 2 [rho]x) / (1 + |rho|^2)
RotationMatrix rodriguez_map(const Vec3& rho);

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& a);

/// Roll, pitch, yaw for R = Rz(yaw) Ry(pitch) Rx(roll); pitch in [-pi/2, pi/2].
/// At gimbal lock yaw is pinned to 0.
Vec3 euler_zyx(const RotationMatrix& r);

/// Inverse of euler_zyx on its principal range.
RotationMatrix from_euler_zyx(const Vec3& rpy);

bool all_finite(const Mat3& m);

}  // namespace ppfpose
