#include "handcept/rot/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

namespace handcept::rot {

char axis_name(Axis axis) {
  switch (axis) {
    case Axis::X:
      return 'x';
    case Axis::Y:
      return 'y';
    case Axis::Z:
      return 'z';
  }
  return '?';
}

Axis parse_axis(char c) {
  switch (c) {
    case 'x':
    case 'X':
      return Axis::X;
    case 'y':
    case 'Y':
      return Axis::Y;
    case 'z':
    case 'Z':
      return Axis::Z;
    default:
      throw std::invalid_argument(std::string("unknown axis '") + c + "'");
  }
}

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("quaternion must be finite and nonzero");
  }
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  bool flip = w < 0.0;
  if (w == 0.0) {
    const double first = x != 0.0 ? x : (y != 0.0 ? y : z);
    flip = first < 0.0;
  }
  if (flip) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  // -0.0 would break defaulted equality against +0.0 coefficients.
  w_ = w + 0.0;
  x_ = x + 0.0;
  y_ = y + 0.0;
  z_ = z + 0.0;
}

UnitQuaternion UnitQuaternion::from_coeffs(const Eigen::Vector4d& wxyz) {
  return {wxyz[0], wxyz[1], wxyz[2], wxyz[3]};
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) {
    return {};
  }
  const Eigen::Vector3d u = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), s * u.x(), s * u.y(), s * u.z()};
}

UnitQuaternion UnitQuaternion::from_rotation_vector(const Eigen::Vector3d& rv) {
  const double angle = rv.norm();
  if (angle < 1e-12) {
    return {1.0, 0.5 * rv.x(), 0.5 * rv.y(), 0.5 * rv.z()};
  }
  return from_axis_angle(rv, angle);
}

UnitQuaternion UnitQuaternion::about(Axis axis, double angle) {
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  u[static_cast<int>(axis)] = 1.0;
  return from_axis_angle(u, angle);
}

UnitQuaternion UnitQuaternion::inverse() const { return {w_, -x_, -y_, -z_}; }

double UnitQuaternion::dot(const UnitQuaternion& other) const {
  return w_ * other.w_ + x_ * other.x_ + y_ * other.y_ + z_ * other.z_;
}

Eigen::Vector3d UnitQuaternion::log() const {
  const Eigen::Vector3d v = vec();
  const double s = v.norm();
  if (s < 1e-300) {
    return Eigen::Vector3d::Zero();
  }
  // w >= 0 by canonical sign, so the angle lands in [0, pi].
  const double angle = 2.0 * std::atan2(s, w_);
  return v * (angle / s);
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& rhs) const {
  return from_coeffs(hamilton_product(coeffs(), rhs.coeffs()));
}

Eigen::Vector4d hamilton_product(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

Eigen::Matrix4d left_multiplication_matrix(const Eigen::Vector4d& q) {
  Eigen::Matrix4d m;
  // clang-format off
  m << q[0], -q[1], -q[2], -q[3],
       q[1],  q[0], -q[3],  q[2],
       q[2],  q[3],  q[0], -q[1],
       q[3], -q[2],  q[1],  q[0];
  // clang-format on
  return m;
}

Eigen::Matrix4d right_multiplication_matrix(const Eigen::Vector4d& p) {
  Eigen::Matrix4d m;
  // clang-format off
  m << p[0], -p[1], -p[2], -p[3],
       p[1],  p[0],  p[3], -p[2],
       p[2], -p[3],  p[0],  p[1],
       p[3],  p[2], -p[1],  p[0];
  // clang-format on
  return m;
}

UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b) { return a * b; }

UnitQuaternion small_rotation_quat(const Eigen::Vector3d& omega, double dt) {
  if (dt < 0.0) {
    throw std::invalid_argument("small_rotation_quat: dt must be >= 0");
  }
  const Eigen::Vector3d half = 0.5 * dt * omega;
  return {1.0, half.x(), half.y(), half.z()};
}

double quat_geodesic_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double c = std::clamp(std::abs(a.dot(b)), -1.0, 1.0);
  return 2.0 * std::acos(c);
}

RotationMatrix3 quat_to_matrix(const UnitQuaternion& q) { return quat_to_matrix(q.coeffs()); }

RotationMatrix3 quat_to_matrix(const Eigen::Vector4d& wxyz) {
  const double n2 = wxyz.squaredNorm();
  if (!(n2 > 0.0)) {
    throw std::invalid_argument("quat_to_matrix: zero quaternion");
  }
  const double s = 2.0 / n2;
  const double w = wxyz[0], x = wxyz[1], y = wxyz[2], z = wxyz[3];
  const double xx = x * x * s, yy = y * y * s, zz = z * z * s;
  const double xy = x * y * s, xz = x * z * s, yz = y * z * s;
  const double wx = w * x * s, wy = w * y * s, wz = w * z * s;
  RotationMatrix3 r;
  // clang-format off
  r << 1.0 - (yy + zz), xy - wz,         xz + wy,
       xy + wz,         1.0 - (xx + zz), yz - wx,
       xz - wy,         yz + wx,         1.0 - (xx + yy);
  // clang-format on
  return r;
}

double orthonormality_residual(const RotationMatrix3& r) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).norm() + std::abs(r.determinant() - 1.0);
}

UnitQuaternion matrix_to_quat(const RotationMatrix3& r) {
  if (!r.allFinite() || orthonormality_residual(r) > 1e-6) {
    throw std::invalid_argument("matrix_to_quat: input is not a rotation matrix");
  }
  // Largest-diagonal branch (Shepperd).
  const double tr = r.trace();
  double w, x, y, z;
  if (tr >= r(0, 0) && tr >= r(1, 1) && tr >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  return {w, x, y, z};
}

RotationMatrix3 axis_rotation(Axis axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RotationMatrix3 r;
  switch (axis) {
    case Axis::X:
      r << 1, 0, 0, 0, c, -s, 0, s, c;
      break;
    case Axis::Y:
      r << c, 0, s, 0, 1, 0, -s, 0, c;
      break;
    case Axis::Z:
      r << c, -s, 0, s, c, 0, 0, 0, 1;
      break;
  }
  return r;
}

double wrap_angle(double angle) {
  constexpr double kPi = std::numbers::pi;
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

}  // namespace handcept::rot
