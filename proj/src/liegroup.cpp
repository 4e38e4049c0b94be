#include "ppfpose/liegroup.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ppfpose/errors.hpp"

namespace ppfpose {

double orthogonality_defect(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm();
}

bool all_finite(const Mat3& m) { return m.allFinite(); }

RotationMatrix RotationMatrix::from_matrix(const Mat3& m) {
  if (!m.allFinite()) throw InvalidInput("rotation matrix has non-finite entries");
  if (orthogonality_defect(m) > kOrthogonalityTolerance ||
      std::abs(m.determinant() - 1.0) > kOrthogonalityTolerance) {
    throw InvalidInput("matrix is not a proper rotation");
  }
  return RotationMatrix(m, Unchecked{});
}

RotationMatrix RotationMatrix::project(const Mat3& m) {
  if (!m.allFinite()) throw InvalidInput("rotation matrix has non-finite entries");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return RotationMatrix(u * d * v.transpose(), Unchecked{});
}

RotationMatrix RotationMatrix::renormalized(const Mat3& m) {
  if (m.allFinite() && orthogonality_defect(m) <= kOrthogonalityTolerance &&
      m.determinant() > 0.0) {
    return RotationMatrix(m, Unchecked{});
  }
  return project(m);
}

Pose Pose::from_matrix(const Mat4& t) {
  if (t.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) {
    throw InvalidInput("homogeneous transform must have bottom row [0 0 0 1]");
  }
  Pose out;
  out.r = RotationMatrix::from_matrix(t.topLeftCorner<3, 3>());
  out.p = t.topRightCorner<3, 1>();
  if (!out.p.allFinite()) throw InvalidInput("position has non-finite entries");
  return out;
}

Mat4 Pose::matrix() const {
  Mat4 t = Mat4::Identity();
  t.topLeftCorner<3, 3>() = r.matrix();
  t.topRightCorner<3, 1>() = p;
  return t;
}

Mat3 skew(const Vec3& b) {
  Mat3 m;
  m << 0.0, -b.z(), b.y(),
       b.z(), 0.0, -b.x(),
       -b.y(), b.x(), 0.0;
  return m;
}

Vec3 vex(const Mat3& m) {
  if ((m + m.transpose()).norm() > kOrthogonalityTolerance) {
    throw NotAntisymmetric("vex: input is not skew-symmetric");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat4 wedge(const Twist& y) {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = skew(y.omega);
  m.topRightCorner<3, 1>() = y.v;
  return m;
}

Mat3 pa(const Mat3& m) { return 0.5 * (m - m.transpose()); }

double dist_so3(const RotationMatrix& r) {
  const double d = 0.25 * (3.0 - r.matrix().trace());
  // Rounding can push the trace a few ulps outside [-1, 3].
  return std::clamp(d, 0.0, 1.0);
}

RotationMatrix so3_exp(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const Mat3 k = skew(phi);
  double a;
  double b;
  if (std::sqrt(theta2) < kExpSeriesThreshold) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return RotationMatrix::renormalized(Mat3::Identity() + a * k + b * k * k);
}

RotationMatrix rodriguez_map(const Vec3& rho) {
  const double n2 = rho.squaredNorm();
  const Mat3 m = ((1.0 - n2) * Mat3::Identity() + 2.0 * rho * rho.transpose() +
                  2.0 * skew(rho)) /
                 (1.0 + n2);
  return RotationMatrix::renormalized(m);
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose{a.r * b.r, a.r * b.p + a.p};
}

Pose inverse(const Pose& a) {
  const RotationMatrix rt = a.r.transpose();
  return Pose{rt, -(rt * a.p)};
}

Vec3 euler_zyx(const RotationMatrix& rot) {
  const Mat3& r = rot.matrix();
  const double s = std::clamp(-r(2, 0), -1.0, 1.0);
  const double pitch = std::asin(s);
  if (std::abs(s) > 1.0 - 1e-12) {
    const double roll = std::atan2(-r(1, 2), r(1, 1));
    return Vec3(roll, pitch, 0.0);
  }
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return Vec3(roll, pitch, yaw);
}

RotationMatrix from_euler_zyx(const Vec3& rpy) {
  return so3_exp(Vec3(0, 0, rpy.z())) * so3_exp(Vec3(0, rpy.y(), 0)) *
         so3_exp(Vec3(rpy.x(), 0, 0));
}

}  // namespace ppfpose
