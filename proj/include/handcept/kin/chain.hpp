#pragma once

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handcept/rot/quaternion.hpp"

namespace handcept::kin {

using rot::Axis;
using rot::RotationMatrix3;

struct Transform {
  RotationMatrix3 rotation = RotationMatrix3::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Transform from_rotation(const RotationMatrix3& r) { return {r, Eigen::Vector3d::Zero()}; }
  static Transform from_homogeneous(const Eigen::Matrix4d& h);

  Transform operator*(const Transform& rhs) const;
  Transform inverse() const;
  Eigen::Matrix4d homogeneous() const;
};

struct FrameId {
  enum class Kind { Imu, ImuBase, ArmBase, EndEffector, Link };
  Kind kind = Kind::ArmBase;
  int index = 0;

  static FrameId link(int i) { return {Kind::Link, i}; }
  static FrameId imu(int i) { return {Kind::Imu, i}; }
  static FrameId arm_base() { return {Kind::ArmBase, 0}; }
  static FrameId end_effector() { return {Kind::EndEffector, 0}; }
};

struct JointLimits {
  double lower = -std::numbers::pi;
  double upper = std::numbers::pi;
};

/// One revolute joint and the link it drives. The child link frame is
///   parent * link_offset * fixed_pre_rotation * axis_rotation(axis, angle).
struct JointSpec {
  std::string name;
  Axis axis = Axis::Z;
  RotationMatrix3 fixed_pre_rotation = RotationMatrix3::Identity();
  int parent = -1;  // -1: chain base
  Transform link_offset;
  JointLimits limits;
  bool tracked = false;  // link carries an orientation sensor
  int finger = 0;

  // link_offset.rotation * fixed_pre_rotation
  RotationMatrix3 constant_rotation() const { return link_offset.rotation * fixed_pre_rotation; }
};

// Angles in radians, one per joint in chain order.
using JointAngles = std::vector<double>;

/// Contiguous run of joints between a tracked link and its nearest tracked
/// ancestor (or the base). Only runs of one or two joints can be recovered
/// from orientation alone.
struct Segment {
  int link = 0;
  int anchor = -1;         // tracked ancestor link, -1 for the base
  std::vector<int> joints; // base-side first
};

class KinematicChain {
 public:
  KinematicChain() = default;
  // Throws std::invalid_argument when a parent index does not precede its
  // child or a rotation is not orthonormal.
  explicit KinematicChain(std::vector<JointSpec> joints);

  std::size_t size() const { return joints_.size(); }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const JointSpec& joint(std::size_t i) const { return joints_.at(i); }
  int index_of(const std::string& name) const;  // -1 when absent

  // Tracked links in chain order; position in this list is the sensor id.
  const std::vector<int>& tracked_links() const { return tracked_; }
  int sensor_of(int link) const;  // -1 when untracked

  // Estimation segments, one per tracked link, in sensor order. Throws
  // std::invalid_argument when a joint is not covered by any segment or a
  // segment spans more than two joints.
  std::vector<Segment> segments() const;

  bool within_limits(const JointAngles& q) const;

 private:
  std::vector<JointSpec> joints_;
  std::vector<int> tracked_;
};

// Pose of `frame` relative to the chain base. Accepts Link and EndEffector
// (the last joint's link) and ArmBase (identity); throws std::out_of_range for
// unknown links and std::invalid_argument for sensor frames or a wrong angle
// count.
Transform forward_link_pose(const KinematicChain& chain, const JointAngles& q, FrameId frame);

// All link poses in chain order.
std::vector<Transform> forward_all(const KinematicChain& chain, const JointAngles& q);

/// IMU_i -> end-effector transform chaining the measured IMU orientation, the
/// IMU-base-to-arm-base calibration and the arm forward kinematics:
///   T(z_imu) * imu_base_to_arm_base * FK_ee(arm_angles).
Transform imu_to_ee_transform(const rot::UnitQuaternion& z_imu, const Transform& imu_base_to_arm_base,
                              const JointAngles& arm_angles, const KinematicChain& arm);

// Two fingers of three joints each (lateral z, proximal y, distal y) on a
// fixed palm; proximal and distal links carry sensors.
KinematicChain default_hand_chain();

}  // namespace handcept::kin
