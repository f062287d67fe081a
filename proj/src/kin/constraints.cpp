#include "handcept/kin/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

#include "handcept/rot/euler.hpp"

namespace handcept::kin {
namespace {

constexpr double kFlatTolerance = 1e-12;
constexpr double kLockTolerance = 1e-9;
constexpr int kMaxAscentSweeps = 200;
constexpr double kAscentTolerance = 1e-13;

Eigen::Vector3d unit(Axis a) {
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e[static_cast<int>(a)] = 1.0;
  return e;
}

struct Pair {
  double theta;
  double phi;
  double residual;
};

double residual_of(const RotationMatrix3& pose, const ConfigurationSpec& spec, double theta, double phi) {
  return (pose - compose_configuration(spec, theta, phi)).norm();
}

double best_phi(const RotationMatrix3& pose, const ConfigurationSpec& spec, double theta) {
  return rot::single_axis_angle(
      spec.middle.transpose() * rot::axis_rotation(spec.first, theta).transpose() * pose, spec.last);
}

double best_theta(const RotationMatrix3& pose, const ConfigurationSpec& spec, double phi) {
  return rot::single_axis_angle(
      pose * rot::axis_rotation(spec.last, phi).transpose() * spec.middle.transpose(), spec.first);
}

// Each half-step maximizes tr(pose^T R_first middle R_last) exactly over one
// angle, so the objective is monotone.
Pair ascend(const RotationMatrix3& pose, const ConfigurationSpec& spec, double theta) {
  double phi = best_phi(pose, spec, theta);
  for (int sweep = 0; sweep < kMaxAscentSweeps; ++sweep) {
    const double next_theta = best_theta(pose, spec, phi);
    const double next_phi = best_phi(pose, spec, next_theta);
    const double step = std::abs(rot::wrap_angle(next_theta - theta)) + std::abs(rot::wrap_angle(next_phi - phi));
    theta = next_theta;
    phi = next_phi;
    if (step < kAscentTolerance) {
      break;
    }
  }
  return {rot::wrap_angle(theta), rot::wrap_angle(phi), residual_of(pose, spec, theta, phi)};
}

}  // namespace

double projection_cost(const RotationMatrix3& observed, const RotationMatrix3& constrained, Axis axis,
                       double angle) {
  return 0.5 * (observed - constrained * rot::axis_rotation(axis, angle)).squaredNorm();
}

ProjectionResult project_kinematic_constraint(const RotationMatrix3& observed,
                                              const RotationMatrix3& constrained, Axis axis) {
  const RotationMatrix3 m = constrained.transpose() * observed;
  const int i = static_cast<int>(axis);
  const int j = (i + 1) % 3;
  const int k = (i + 2) % 3;
  const double y = m(k, j) - m(j, k);
  const double x = m(j, j) + m(k, k);
  ProjectionResult out;
  out.ambiguous = std::abs(x) < kFlatTolerance && std::abs(y) < kFlatTolerance;
  out.removed_angle = out.ambiguous ? 0.0 : std::atan2(y, x);
  out.corrected = constrained * rot::axis_rotation(axis, out.removed_angle);
  out.residual = out.corrected.transpose() * observed;
  return out;
}

RotationMatrix3 compose_configuration(const ConfigurationSpec& spec, double theta, double phi) {
  return rot::axis_rotation(spec.first, theta) * spec.middle * rot::axis_rotation(spec.last, phi);
}

ConfigurationSolution solve_configuration(const RotationMatrix3& pose, const ConfigurationSpec& spec,
                                          double prev_theta, double prev_phi) {
  const Eigen::Vector3d e_first = unit(spec.first);
  const Eigen::Vector3d v = spec.middle * unit(spec.last);

  ConfigurationSolution out;
  if (std::abs(v.dot(e_first)) >= 1.0 - kLockTolerance) {
    out.locked = true;
    out.theta = prev_theta;
    out.phi = rot::wrap_angle(best_phi(pose, spec, prev_theta));
    out.residual = residual_of(pose, spec, out.theta, out.phi);
    out.on_manifold = out.residual <= kOnManifoldTolerance;
    return out;
  }

  // Closed-form start: R_first(theta) must carry middle * e_last onto
  // pose * e_last, which fixes theta from the components orthogonal to e_first.
  const Eigen::Vector3d u = pose * unit(spec.last);
  const Eigen::Vector3d vp = v - v.dot(e_first) * e_first;
  const Eigen::Vector3d up = u - u.dot(e_first) * e_first;
  double theta0 = prev_theta;
  if (up.norm() > kFlatTolerance) {
    theta0 = std::atan2(e_first.dot(vp.cross(up)), vp.dot(up));
  }

  const Pair a = ascend(pose, spec, theta0);
  const Pair b = ascend(pose, spec, prev_theta);
  auto dist = [&](const Pair& p) {
    return std::abs(rot::wrap_angle(p.theta - prev_theta)) + std::abs(rot::wrap_angle(p.phi - prev_phi));
  };
  const Pair* pick = &a;
  if (b.residual < a.residual - kFlatTolerance ||
      (std::abs(b.residual - a.residual) <= kFlatTolerance && dist(b) < dist(a))) {
    pick = &b;
  }
  out.theta = pick->theta;
  out.phi = pick->phi;
  out.residual = pick->residual;
  out.on_manifold = out.residual <= kOnManifoldTolerance;
  return out;
}

ChainSolveReport solve_joint_angles(const KinematicChain& chain, std::span<const Segment> segments,
                                    std::span<const RotationMatrix3> link_rotations,
                                    const JointAngles& prev) {
  if (link_rotations.size() != chain.tracked_links().size()) {
    throw std::invalid_argument("solve_joint_angles: one rotation per tracked link required");
  }
  if (prev.size() != chain.size()) {
    throw std::invalid_argument("solve_joint_angles: prev has the wrong joint count");
  }
  ChainSolveReport report;
  report.angles = prev;
  for (const Segment& seg : segments) {
    const RotationMatrix3& link_rot = link_rotations[chain.sensor_of(seg.link)];
    const RotationMatrix3 anchor_rot =
        seg.anchor < 0 ? RotationMatrix3::Identity() : link_rotations[chain.sensor_of(seg.anchor)];
    if (seg.joints.size() == 1) {
      const JointSpec& j = chain.joint(seg.joints[0]);
      const ProjectionResult p = project_kinematic_constraint(link_rot, anchor_rot * j.constant_rotation(), j.axis);
      report.angles[seg.joints[0]] = p.removed_angle;
      report.max_residual = std::max(report.max_residual, (link_rot - p.corrected).norm());
    } else {
      const JointSpec& ja = chain.joint(seg.joints[0]);
      const JointSpec& jb = chain.joint(seg.joints[1]);
      const RotationMatrix3 pose = ja.constant_rotation().transpose() * anchor_rot.transpose() * link_rot;
      const ConfigurationSpec spec{ja.axis, jb.constant_rotation(), jb.axis};
      const ConfigurationSolution s = solve_configuration(pose, spec, prev[seg.joints[0]], prev[seg.joints[1]]);
      report.angles[seg.joints[0]] = s.theta;
      report.angles[seg.joints[1]] = s.phi;
      report.max_residual = std::max(report.max_residual, s.residual);
    }
  }
  return report;
}

}  // namespace handcept::kin
