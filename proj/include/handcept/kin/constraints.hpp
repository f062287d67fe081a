#pragma once

#include <span>
#include <vector>

#include "handcept/kin/chain.hpp"

namespace handcept::kin {

struct ProjectionResult {
  // constrained * axis_rotation(axis, removed_angle): the closest point on the
  // single-axis manifold through `constrained`.
  RotationMatrix3 corrected;
  double removed_angle = 0.0;
  // corrected^T * observed, the off-axis rotation that was stripped.
  RotationMatrix3 residual;
  // The Frobenius objective is flat in the angle; removed_angle is 0.
  bool ambiguous = false;
};

/// Closed-form minimizer of 1/2 ||observed - constrained * R_axis(angle)||_F^2.
///
/// With M = constrained^T observed and (j, k) the in-plane axes of `axis`,
/// the optimum is atan2(M_kj - M_jk, M_jj + M_kk).
ProjectionResult project_kinematic_constraint(const RotationMatrix3& observed,
                                              const RotationMatrix3& constrained, Axis axis);

// 1/2 ||observed - constrained * R_axis(angle)||_F^2
double projection_cost(const RotationMatrix3& observed, const RotationMatrix3& constrained, Axis axis,
                       double angle);

/// pose = R_first(theta) * middle * R_last(phi)
struct ConfigurationSpec {
  Axis first = Axis::Z;
  RotationMatrix3 middle = RotationMatrix3::Identity();
  Axis last = Axis::X;
};

struct ConfigurationSolution {
  double theta = 0.0;
  double phi = 0.0;
  // Frobenius norm of pose - R_first(theta) middle R_last(phi).
  double residual = 0.0;
  // residual <= kOnManifoldTolerance
  bool on_manifold = true;
  // middle * e_last is parallel to e_first: only theta + phi (or theta - phi)
  // is observable, and theta is held at prev.theta.
  bool locked = false;
};

inline constexpr double kOnManifoldTolerance = 1e-8;

/// Least-squares (theta, phi) for pose ~= R_first(theta) middle R_last(phi).
///
/// Candidates are refined by exact block-coordinate ascent from both a
/// closed-form start and prev; the lower-residual pair wins and ties go to the
/// pair closest to prev.
ConfigurationSolution solve_configuration(const RotationMatrix3& pose, const ConfigurationSpec& spec,
                                          double prev_theta, double prev_phi);

RotationMatrix3 compose_configuration(const ConfigurationSpec& spec, double theta, double phi);

struct ChainSolveReport {
  JointAngles angles;
  double max_residual = 0.0;  // worst off-manifold residual across segments
};

/// Joint angles from tracked-link orientations (sensor order, expressed in
/// the chain base frame). Single-joint segments use the projection;
/// two-joint segments use solve_configuration. `prev` seeds continuity.
ChainSolveReport solve_joint_angles(const KinematicChain& chain, std::span<const Segment> segments,
                                    std::span<const RotationMatrix3> link_rotations,
                                    const JointAngles& prev);

}  // namespace handcept::kin
