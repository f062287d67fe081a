#pragma once

#include <Eigen/Core>

namespace handcept::rot {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

char axis_name(Axis axis);
Axis parse_axis(char c);

// 3x3 rotation matrix, R(i, j) is row i, column j (0-indexed in code).
using RotationMatrix3 = Eigen::Matrix3d;

/// Unit quaternion (w, x, y, z) in Hamilton convention.
///
/// Every constructed value is normalized and sign-canonical: w >= 0, and when
/// w == 0 the first nonzero vector component is positive. Two values compare
/// equal only if they describe the same rotation with the same coefficients.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  // Throws std::invalid_argument on a zero or non-finite input.
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_coeffs(const Eigen::Vector4d& wxyz);
  static UnitQuaternion from_axis_angle(const Eigen::Vector3d& axis, double angle);
  static UnitQuaternion from_rotation_vector(const Eigen::Vector3d& rv);
  static UnitQuaternion about(Axis axis, double angle);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  Eigen::Vector4d coeffs() const { return {w_, x_, y_, z_}; }
  Eigen::Vector3d vec() const { return {x_, y_, z_}; }

  UnitQuaternion inverse() const;
  double dot(const UnitQuaternion& other) const;

  // Rotation vector (axis * angle) with angle in [0, pi].
  Eigen::Vector3d log() const;

  UnitQuaternion operator*(const UnitQuaternion& rhs) const;
  bool operator==(const UnitQuaternion&) const = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

// Raw Hamilton product on 4-vectors; no normalization.
Eigen::Vector4d hamilton_product(const Eigen::Vector4d& a, const Eigen::Vector4d& b);

// L(q) with q (x) p = L(q) p.
Eigen::Matrix4d left_multiplication_matrix(const Eigen::Vector4d& q);
// R(p) with q (x) p = R(p) q.
Eigen::Matrix4d right_multiplication_matrix(const Eigen::Vector4d& p);

// Hamilton product, renormalized and canonicalized. Composition order:
// quat_multiply(q, dq) applies dq in the body frame of q.
UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b);

// First-order increment normalize([1, omega*dt/2]). Agrees with the exact
// exponential map to O((|omega| dt)^3) in angle; use only for small steps.
UnitQuaternion small_rotation_quat(const Eigen::Vector3d& omega, double dt);

// 2 * acos(|<a, b>|), in [0, pi].
double quat_geodesic_distance(const UnitQuaternion& a, const UnitQuaternion& b);

RotationMatrix3 quat_to_matrix(const UnitQuaternion& q);
// Accepts any nonzero 4-vector; the result is invariant under q -> -q.
RotationMatrix3 quat_to_matrix(const Eigen::Vector4d& wxyz);

// Frobenius norm of R^T R - I plus |det R - 1|.
double orthonormality_residual(const RotationMatrix3& r);

// Throws std::invalid_argument when orthonormality_residual(r) > 1e-6.
UnitQuaternion matrix_to_quat(const RotationMatrix3& r);

// Single-axis rotation matrix.
RotationMatrix3 axis_rotation(Axis axis, double angle);

// Wraps to (-pi, pi].
double wrap_angle(double angle);

}  // namespace handcept::rot
