#include "handcept/kin/chain.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace handcept::kin {

Transform Transform::from_homogeneous(const Eigen::Matrix4d& h) {
  return {h.topLeftCorner<3, 3>(), h.topRightCorner<3, 1>()};
}

Transform Transform::operator*(const Transform& rhs) const {
  return {rotation * rhs.rotation, rotation * rhs.translation + translation};
}

Transform Transform::inverse() const {
  const RotationMatrix3 rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

Eigen::Matrix4d Transform::homogeneous() const {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = rotation;
  h.topRightCorner<3, 1>() = translation;
  return h;
}

KinematicChain::KinematicChain(std::vector<JointSpec> joints) : joints_(std::move(joints)) {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const JointSpec& j = joints_[i];
    if (j.parent < -1 || j.parent >= static_cast<int>(i)) {
      throw std::invalid_argument("joint '" + j.name + "': parent must precede the child");
    }
    if (rot::orthonormality_residual(j.fixed_pre_rotation) > 1e-6 ||
        rot::orthonormality_residual(j.link_offset.rotation) > 1e-6) {
      throw std::invalid_argument("joint '" + j.name + "': rotation is not orthonormal");
    }
    if (!(j.limits.lower < j.limits.upper)) {
      throw std::invalid_argument("joint '" + j.name + "': empty limit interval");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (!j.name.empty() && joints_[k].name == j.name) {
        throw std::invalid_argument("duplicate joint name '" + j.name + "'");
      }
    }
    if (j.tracked) {
      tracked_.push_back(static_cast<int>(i));
    }
  }
}

int KinematicChain::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

int KinematicChain::sensor_of(int link) const {
  for (std::size_t s = 0; s < tracked_.size(); ++s) {
    if (tracked_[s] == link) {
      return static_cast<int>(s);
    }
  }
  return -1;
}

std::vector<Segment> KinematicChain::segments() const {
  std::vector<int> owner(joints_.size(), -1);
  std::vector<Segment> out;
  out.reserve(tracked_.size());
  for (int link : tracked_) {
    Segment seg;
    seg.link = link;
    int cur = link;
    while (cur >= 0) {
      seg.joints.insert(seg.joints.begin(), cur);
      const int parent = joints_[cur].parent;
      if (parent >= 0 && joints_[parent].tracked) {
        seg.anchor = parent;
        break;
      }
      cur = parent;
    }
    if (seg.joints.size() > 2) {
      throw std::invalid_argument("link '" + joints_[link].name + "' is " +
                                  std::to_string(seg.joints.size()) +
                                  " joints from its tracked ancestor; at most 2 are observable");
    }
    for (int j : seg.joints) {
      if (owner[j] >= 0) {
        throw std::invalid_argument("joint '" + joints_[j].name + "' is shared by two tracked links");
      }
      owner[j] = link;
    }
    out.push_back(std::move(seg));
  }
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    if (owner[j] < 0) {
      throw std::invalid_argument("joint '" + joints_[j].name + "' has no tracked descendant link");
    }
  }
  return out;
}

bool KinematicChain::within_limits(const JointAngles& q) const {
  if (q.size() != joints_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < joints_[i].limits.lower || q[i] > joints_[i].limits.upper) {
      return false;
    }
  }
  return true;
}

namespace {

Transform joint_transform(const JointSpec& j, double angle) {
  return j.link_offset * Transform::from_rotation(j.fixed_pre_rotation * rot::axis_rotation(j.axis, angle));
}

void check_angles(const KinematicChain& chain, const JointAngles& q) {
  if (q.size() != chain.size()) {
    throw std::invalid_argument("expected " + std::to_string(chain.size()) + " joint angles, got " +
                                std::to_string(q.size()));
  }
}

}  // namespace

std::vector<Transform> forward_all(const KinematicChain& chain, const JointAngles& q) {
  check_angles(chain, q);
  std::vector<Transform> poses(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const JointSpec& j = chain.joint(i);
    const Transform local = joint_transform(j, q[i]);
    poses[i] = j.parent < 0 ? local : poses[j.parent] * local;
  }
  return poses;
}

Transform forward_link_pose(const KinematicChain& chain, const JointAngles& q, FrameId frame) {
  check_angles(chain, q);
  int link = 0;
  switch (frame.kind) {
    case FrameId::Kind::ArmBase:
      return {};
    case FrameId::Kind::EndEffector:
      if (chain.size() == 0) {
        return {};
      }
      link = static_cast<int>(chain.size()) - 1;
      break;
    case FrameId::Kind::Link:
      link = frame.index;
      if (link < 0 || link >= static_cast<int>(chain.size())) {
        throw std::out_of_range("unknown link " + std::to_string(link));
      }
      break;
    case FrameId::Kind::Imu:
    case FrameId::Kind::ImuBase:
      throw std::invalid_argument("sensor frames are not part of the kinematic chain");
  }
  Transform pose;
  for (int cur = link; cur >= 0; cur = chain.joint(cur).parent) {
    pose = joint_transform(chain.joint(cur), q[cur]) * pose;
  }
  return pose;
}

Transform imu_to_ee_transform(const rot::UnitQuaternion& z_imu, const Transform& imu_base_to_arm_base,
                              const JointAngles& arm_angles, const KinematicChain& arm) {
  return Transform::from_rotation(rot::quat_to_matrix(z_imu)) * imu_base_to_arm_base *
         forward_link_pose(arm, arm_angles, FrameId::end_effector());
}

KinematicChain default_hand_chain() {
  constexpr double kDeg = std::numbers::pi / 180.0;
  std::vector<JointSpec> joints;
  for (int finger = 0; finger < 2; ++finger) {
    const std::string prefix = finger == 0 ? "left_" : "right_";
    const int base = static_cast<int>(joints.size());
    JointSpec lateral;
    lateral.name = prefix + "lateral";
    lateral.axis = Axis::Z;
    lateral.parent = -1;
    lateral.link_offset.translation = {0.03, finger == 0 ? 0.02 : -0.02, 0.0};
    lateral.limits = {-35.0 * kDeg, 35.0 * kDeg};
    lateral.finger = finger;

    JointSpec proximal;
    proximal.name = prefix + "proximal";
    proximal.axis = Axis::Y;
    proximal.parent = base;
    proximal.link_offset.translation = {0.008, 0.0, 0.0};
    proximal.limits = {-20.0 * kDeg, 110.0 * kDeg};
    proximal.tracked = true;
    proximal.finger = finger;

    JointSpec distal;
    distal.name = prefix + "distal";
    distal.axis = Axis::Y;
    distal.parent = base + 1;
    distal.link_offset.translation = {0.045, 0.0, 0.0};
    distal.limits = {-20.0 * kDeg, 110.0 * kDeg};
    distal.tracked = true;
    distal.finger = finger;

    joints.push_back(lateral);
    joints.push_back(proximal);
    joints.push_back(distal);
  }
  return KinematicChain(std::move(joints));
}

}  // namespace handcept::kin
