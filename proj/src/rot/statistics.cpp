#include "handcept/rot/statistics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace handcept::rot {
namespace {

constexpr int kMaxRefinementSteps = 20;
constexpr double kStepTolerance = 1e-15;
// Relative eigengap of the accumulator below which the mean is not unique.
constexpr double kEigengapTolerance = 1e-9;

}  // namespace

double geodesic_cost(const UnitQuaternion& q, std::span<const UnitQuaternion> samples) {
  double cost = 0.0;
  for (const auto& s : samples) {
    const double d = quat_geodesic_distance(q, s);
    cost += d * d;
  }
  return cost;
}

QuaternionMean quat_mean(std::span<const UnitQuaternion> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("quat_mean: empty sample set");
  }
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  const Eigen::Vector4d ref = samples.front().coeffs();
  for (const auto& s : samples) {
    Eigen::Vector4d v = s.coeffs();
    if (v.dot(ref) < 0.0) {
      v = -v;
    }
    acc += v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(acc);
  const Eigen::Vector4d& lambda = eig.eigenvalues();  // ascending
  QuaternionMean out;
  out.unique = (lambda[3] - lambda[2]) > kEigengapTolerance * lambda[3];
  UnitQuaternion mean = UnitQuaternion::from_coeffs(eig.eigenvectors().col(3));

  // Intrinsic gradient descent on sum d^2; the unit step is the Karcher
  // fixed-point iteration.
  const double n = static_cast<double>(samples.size());
  for (int step = 0; step < kMaxRefinementSteps; ++step) {
    const UnitQuaternion inv = mean.inverse();
    Eigen::Vector3d tangent = Eigen::Vector3d::Zero();
    for (const auto& s : samples) {
      tangent += (inv * s).log();
    }
    tangent /= n;
    mean = mean * UnitQuaternion::from_rotation_vector(tangent);
    if (tangent.norm() < kStepTolerance) {
      break;
    }
  }
  out.mean = mean;
  return out;
}

AngularStats angular_variance(std::span<const UnitQuaternion> samples, const UnitQuaternion& mean) {
  if (samples.empty()) {
    throw std::invalid_argument("angular_variance: empty sample set");
  }
  const UnitQuaternion inv = mean.inverse();
  std::vector<double> theta;
  theta.reserve(samples.size());
  double sum = 0.0;
  for (const auto& s : samples) {
    const UnitQuaternion dq = s * inv;
    // 2 acos|w| written via atan2 for accuracy at small angles.
    const double t = 2.0 * std::atan2(dq.vec().norm(), std::abs(dq.w()));
    theta.push_back(t);
    sum += t;
  }
  const double n = static_cast<double>(samples.size());
  const double avg = sum / n;
  double var = 0.0;
  for (double t : theta) {
    var += (t - avg) * (t - avg);
  }
  var /= n;
  constexpr double kDeg = 180.0 / std::numbers::pi;
  return {mean, var * kDeg * kDeg, samples.size()};
}

}  // namespace handcept::rot
