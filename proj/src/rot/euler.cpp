#include "handcept/rot/euler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace handcept::rot {
namespace {

constexpr double kPi = std::numbers::pi;

int idx(Axis a) { return static_cast<int>(a); }

// +1 when (i, j, k) is a cyclic permutation of (0, 1, 2).
double parity(int i, int j) { return ((j - i + 3) % 3) == 1 ? 1.0 : -1.0; }

struct Candidate {
  double alpha;
  double beta;
  double gamma;
};

double distance_to(const Candidate& c, const EulerAngles& prev) {
  return std::abs(wrap_angle(c.alpha - prev.alpha)) + std::abs(wrap_angle(c.beta - prev.beta)) +
         std::abs(wrap_angle(c.gamma - prev.gamma));
}

// atan2 with both arguments multiplied by the sign of the branch's cos/sin
// beta; identical to dividing by it, without the division.
double signed_atan2(double y, double x, double sign) { return wrap_angle(std::atan2(sign * y, sign * x)); }

EulerAngles locked_solution(const RotationMatrix3& r, const EulerAngles& prev, EulerSequence seq,
                            double beta) {
  const auto axes = sequence_axes(seq);
  const double alpha = prev.alpha;
  const RotationMatrix3 m =
      axis_rotation(axes[1], beta).transpose() * axis_rotation(axes[0], alpha).transpose() * r;
  return {alpha, beta, wrap_angle(single_axis_angle(m, axes[2])), seq};
}

}  // namespace

std::array<Axis, 3> sequence_axes(EulerSequence seq) {
  using enum Axis;
  switch (seq) {
    case EulerSequence::XYZ:
      return {X, Y, Z};
    case EulerSequence::XZY:
      return {X, Z, Y};
    case EulerSequence::YXZ:
      return {Y, X, Z};
    case EulerSequence::YZX:
      return {Y, Z, X};
    case EulerSequence::ZXY:
      return {Z, X, Y};
    case EulerSequence::ZYX:
      return {Z, Y, X};
    case EulerSequence::XYX:
      return {X, Y, X};
    case EulerSequence::XZX:
      return {X, Z, X};
    case EulerSequence::YXY:
      return {Y, X, Y};
    case EulerSequence::YZY:
      return {Y, Z, Y};
    case EulerSequence::ZXZ:
      return {Z, X, Z};
    case EulerSequence::ZYZ:
      return {Z, Y, Z};
  }
  throw std::invalid_argument("unknown Euler sequence");
}

bool is_proper_euler(EulerSequence seq) {
  const auto a = sequence_axes(seq);
  return a[0] == a[2];
}

std::string sequence_name(EulerSequence seq) {
  const auto a = sequence_axes(seq);
  std::string s;
  for (Axis x : a) {
    s.push_back(static_cast<char>(std::toupper(axis_name(x))));
  }
  return s;
}

EulerSequence parse_sequence(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (EulerSequence seq : kAllEulerSequences) {
    if (sequence_name(seq) == upper) {
      return seq;
    }
  }
  throw std::invalid_argument("unknown Euler sequence '" + std::string(name) + "'");
}

RotationMatrix3 euler_to_matrix(const EulerAngles& e) {
  const auto a = sequence_axes(e.sequence);
  return axis_rotation(a[0], e.alpha) * axis_rotation(a[1], e.beta) * axis_rotation(a[2], e.gamma);
}

double single_axis_angle(const RotationMatrix3& m, Axis axis) {
  const int i = idx(axis);
  const int j = (i + 1) % 3;
  const int k = (i + 2) % 3;
  const double y = m(k, j) - m(j, k);
  const double x = m(j, j) + m(k, k);
  if (y == 0.0 && x == 0.0) {
    return 0.0;
  }
  return std::atan2(y, x);
}

EulerAngles matrix_to_euler_continuous(const RotationMatrix3& r, const EulerAngles& prev,
                                       EulerSequence seq) {
  if (prev.sequence != seq) {
    throw std::invalid_argument("matrix_to_euler_continuous: prev has sequence " +
                                sequence_name(prev.sequence) + ", expected " + sequence_name(seq));
  }
  const auto axes = sequence_axes(seq);
  const int i = idx(axes[0]);
  const int j = idx(axes[1]);

  Candidate first{};
  Candidate second{};

  if (!is_proper_euler(seq)) {
    const int k = idx(axes[2]);
    const double s = parity(i, j);
    const double sin_beta = std::clamp(s * r(i, k), -1.0, 1.0);
    if (std::abs(std::abs(sin_beta) - 1.0) < kGimbalLockTolerance) {
      return locked_solution(r, prev, seq, std::copysign(kPi / 2.0, sin_beta));
    }
    const double cos_beta = std::hypot(r(j, k), r(k, k));
    const double beta1 = std::atan2(sin_beta, cos_beta);
    first = {signed_atan2(-s * r(j, k), r(k, k), 1.0), beta1,
             signed_atan2(-s * r(i, j), r(i, i), 1.0)};
    second = {signed_atan2(-s * r(j, k), r(k, k), -1.0), kPi - beta1,
              signed_atan2(-s * r(i, j), r(i, i), -1.0)};
  } else {
    const int k = 3 - i - j;
    const double s = parity(i, j);
    const double cos_beta = std::clamp(r(i, i), -1.0, 1.0);
    if (std::abs(std::abs(cos_beta) - 1.0) < kGimbalLockTolerance) {
      return locked_solution(r, prev, seq, cos_beta > 0.0 ? 0.0 : kPi);
    }
    const double sin_beta = std::hypot(r(i, j), r(i, k));
    const double beta1 = std::atan2(sin_beta, cos_beta);
    first = {signed_atan2(r(j, i), -s * r(k, i), 1.0), beta1, signed_atan2(r(i, j), s * r(i, k), 1.0)};
    second = {signed_atan2(r(j, i), -s * r(k, i), -1.0), 2.0 * kPi - beta1,
              signed_atan2(r(i, j), s * r(i, k), -1.0)};
  }

  const Candidate& pick = distance_to(first, prev) <= distance_to(second, prev) ? first : second;
  return {pick.alpha, pick.beta, pick.gamma, seq};
}

EulerAngles matrix_to_euler(const RotationMatrix3& r, EulerSequence seq) {
  return matrix_to_euler_continuous(r, EulerAngles{0.0, 0.0, 0.0, seq}, seq);
}

}  // namespace handcept::rot
