#pragma once

#include <cstddef>
#include <span>

#include "handcept/rot/quaternion.hpp"

namespace handcept::rot {

struct QuaternionMean {
  UnitQuaternion mean;
  // False when the sample set has no unique minimizer (e.g. two rotations
  // 180 degrees apart); `mean` is then one of the minimizers.
  bool unique = true;
};

/// Geodesic (Karcher) mean on SO(3): argmin_q sum_i d(q, q_i)^2.
///
/// Seeds with the dominant eigenvector of the sign-aligned accumulator
/// sum_i q_i q_i^T, then takes intrinsic gradient steps until the tangent
/// update vanishes. Throws std::invalid_argument on an empty set.
QuaternionMean quat_mean(std::span<const UnitQuaternion> samples);

// Sum of squared geodesic distances from q to the samples.
double geodesic_cost(const UnitQuaternion& q, std::span<const UnitQuaternion> samples);

struct AngularStats {
  UnitQuaternion mean;
  double variance_deg2 = 0.0;
  std::size_t count = 0;
};

/// Spread of rotation angles about a given mean: with dq_i = q_i * mean^-1
/// and theta_i = 2 acos(|w_i|), returns the population variance of theta in
/// degrees squared. Throws std::invalid_argument on an empty set.
AngularStats angular_variance(std::span<const UnitQuaternion> samples, const UnitQuaternion& mean);

}  // namespace handcept::rot
