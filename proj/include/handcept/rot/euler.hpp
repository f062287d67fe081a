#pragma once

#include <array>
#include <string>
#include <string_view>

#include "handcept/rot/quaternion.hpp"

namespace handcept::rot {

// Intrinsic axis orders: R = A(alpha) * B(beta) * C(gamma).
enum class EulerSequence {
  XYZ,
  XZY,
  YXZ,
  YZX,
  ZXY,
  ZYX,
  XYX,
  XZX,
  YXY,
  YZY,
  ZXZ,
  ZYZ,
};

inline constexpr std::array<EulerSequence, 12> kAllEulerSequences = {
    EulerSequence::XYZ, EulerSequence::XZY, EulerSequence::YXZ, EulerSequence::YZX,
    EulerSequence::ZXY, EulerSequence::ZYX, EulerSequence::XYX, EulerSequence::XZX,
    EulerSequence::YXY, EulerSequence::YZY, EulerSequence::ZXZ, EulerSequence::ZYZ};

std::array<Axis, 3> sequence_axes(EulerSequence seq);
bool is_proper_euler(EulerSequence seq);
std::string sequence_name(EulerSequence seq);
EulerSequence parse_sequence(std::string_view name);

/// Euler triple in radians. alpha and gamma live in (-pi, pi]. beta is either
/// the principal solution ([-pi/2, pi/2] for Tait-Bryan, [0, pi] for proper
/// sequences) or its alternate branch (pi - principal, resp. 2 pi - principal).
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  EulerSequence sequence = EulerSequence::ZYX;
};

// Magnitude of |beta - lock| below which the decomposition is treated as
// singular, measured on the matrix entry that carries beta.
inline constexpr double kGimbalLockTolerance = 1e-9;

RotationMatrix3 euler_to_matrix(const EulerAngles& e);

/// Decomposes R into the requested sequence, picking among the two regular
/// solutions the one closest to `prev`.
///
/// Away from gimbal lock both branches (beta, beta') are formed and the one
/// with the smaller summed wrapped distance to prev is returned; this reduces
/// to comparing beta alone except near lock, where beta cannot tell the
/// branches apart. At lock, alpha is held at prev.alpha, beta is fixed by the
/// sign of the locking entry and gamma absorbs the remaining rotation.
///
/// Throws std::invalid_argument if prev.sequence != seq.
EulerAngles matrix_to_euler_continuous(const RotationMatrix3& r, const EulerAngles& prev,
                                       EulerSequence seq);

// Same as above with prev = (0, 0, 0).
EulerAngles matrix_to_euler(const RotationMatrix3& r, EulerSequence seq);

// Least-squares angle of a rotation about `axis` closest to m, i.e.
// argmax_theta tr(axis_rotation(axis, theta)^T m). Returns 0 when the
// objective is flat in theta.
double single_axis_angle(const RotationMatrix3& m, Axis axis);

}  // namespace handcept::rot
