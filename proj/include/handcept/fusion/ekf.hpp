#pragma once

#include <Eigen/Core>

#include "handcept/rot/quaternion.hpp"

namespace handcept::fusion {

using StateVector = Eigen::Matrix<double, 7, 1>;
using Covariance = Eigen::Matrix<double, 7, 7>;
using ImuJacobian = Eigen::Matrix<double, 4, 7>;

/// x = [q; b]: link orientation and the additive IMU bias (rad).
struct EkfState {
  rot::UnitQuaternion q;
  Eigen::Vector3d b = Eigen::Vector3d::Zero();

  StateVector vector() const;
};

struct Belief {
  EkfState state;
  Covariance cov = Covariance::Zero();
};

/// Per-tick process noise and per-measurement noise.
struct NoiseConfig {
  Eigen::Matrix4d q_q = 1e-6 * Eigen::Matrix4d::Identity();
  Eigen::Matrix3d q_b = 1e-10 * Eigen::Matrix3d::Identity();
  Eigen::Matrix4d r_imu = 1e-4 * Eigen::Matrix4d::Identity();
  Eigen::Matrix4d r_cam = 1e-5 * Eigen::Matrix4d::Identity();

  Covariance process() const;
  // Throws std::invalid_argument unless every block is symmetric PSD.
  void validate() const;
};

struct InitConfig {
  Eigen::Matrix4d p_q = 1e-2 * Eigen::Matrix4d::Identity();
  Eigen::Matrix3d p_b = 1e-4 * Eigen::Matrix3d::Identity();
  Eigen::Vector3d b0 = Eigen::Vector3d::Zero();

  Covariance covariance() const;
};

// q0 is the first IMU reading of the link.
Belief initial_belief(const rot::UnitQuaternion& q0, const InitConfig& init);

inline constexpr double kMaxInnovationCondition = 1e12;

struct UpdateOutcome {
  bool applied = true;
  double condition_number = 1.0;
};

// F = I: the state carries over and P <- P + Q.
Belief predict(const Belief& belief, const NoiseConfig& noise);

/// q (x) [1, b/2] without renormalization, so the Jacobian below is its
/// exact derivative: [R([1, b/2]) | 1/2 L(q)[:, 1:3]].
Eigen::Vector4d imu_measurement_fn(const EkfState& state);
ImuJacobian imu_measurement_jacobian(const EkfState& state);

/// Shared Kalman step. z is used as given; callers sign-align quaternion
/// blocks first. The quaternion is renormalized afterwards and, if that flips
/// it to the canonical hemisphere, the covariance is flipped with it. An
/// innovation covariance with condition number above kMaxInnovationCondition
/// leaves the belief untouched and reports applied = false.
template <int M>
UpdateOutcome kalman_update(Belief& belief, const Eigen::Matrix<double, M, 1>& z,
                            const Eigen::Matrix<double, M, 1>& h, const Eigen::Matrix<double, M, 7>& H,
                            const Eigen::Matrix<double, M, M>& R);

// Negates z when it lies in the opposite hemisphere from h.
Eigen::Vector4d sign_aligned(const Eigen::Vector4d& z, const Eigen::Vector4d& h);

UpdateOutcome update_camera(Belief& belief, const rot::UnitQuaternion& z_cam, const NoiseConfig& noise);
UpdateOutcome update_imu(Belief& belief, const rot::UnitQuaternion& z_imu, const NoiseConfig& noise);
// Stacked [camera; imu] update with R = diag(R_cam, R_imu).
UpdateOutcome update_joint(Belief& belief, const rot::UnitQuaternion& z_cam, const rot::UnitQuaternion& z_imu,
                           const NoiseConfig& noise);

double min_eigenvalue(const Covariance& cov);

}  // namespace handcept::fusion
