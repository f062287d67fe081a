#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handcept/kin/chain.hpp"
#include "handcept/rot/quaternion.hpp"

namespace handcept::metrics {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // residual RMS
};

// Ordinary least squares y ~ intercept + slope * t. Throws
// std::invalid_argument for fewer than two samples, mismatched lengths or a
// zero spread in t.
LineFit fit_line(std::span<const double> t, std::span<const double> y);

struct AxisDrift {
  std::string axis;
  double slope_deg_per_s = 0.0;
  double intercept_deg = 0.0;
  double rms_deg = 0.0;
};

struct DriftReport {
  std::vector<AxisDrift> axes;
};

/// Per-axis first-order fit of angle series (degrees) against time (s).
DriftReport fit_first_order_drift(std::span<const double> t_s, std::span<const Eigen::Vector3d> angles_deg,
                                  const std::vector<std::string>& axis_names = {"roll", "pitch", "yaw"});

/// Roll, pitch, yaw (ZYX, degrees) of an orientation stream with each angle
/// unwrapped across the +-180 seam.
std::vector<Eigen::Vector3d> unwrapped_rpy_deg(std::span<const rot::UnitQuaternion> orientations);

/// Drift of several equally sampled orientation streams, fitted on their
/// sample-wise mean roll/pitch/yaw.
DriftReport orientation_drift(std::span<const double> t_s,
                              const std::vector<std::vector<rot::UnitQuaternion>>& streams);

// An error-magnitude slope at or below this counts as drift-free.
inline constexpr double kDriftFreeSlopeDegPerS = 1e-4;

struct JointError {
  double rmse_deg = 0.0;
  double max_deg = 0.0;
  double slope_deg_per_s = 0.0;  // slope of |error| over time
};

struct ErrorReport {
  std::string mode;
  std::vector<JointError> joints;
  double mean_rmse_deg = 0.0;
  // Slope of the joint-averaged |error| over time.
  double mean_slope_deg_per_s = 0.0;

  bool drift_free() const;
};

// Signed difference est - truth in degrees, wrapped to (-180, 180].
double wrapped_error_deg(double est_rad, double truth_rad);

/// Joint-angle error statistics; est and truth are radians, one row per time.
ErrorReport joint_angle_error(std::span<const double> t_s, std::span<const kin::JointAngles> est,
                              std::span<const kin::JointAngles> truth, std::string mode = {});

struct PoseVariance {
  int pose = 0;
  double variance_deg2 = 0.0;
  std::size_t samples = 0;
  bool unique_mean = true;
};

/// quat_mean then angular_variance per pose, ordered by pose id.
std::vector<PoseVariance> uniformity_report(const std::map<int, std::vector<rot::UnitQuaternion>>& sets);

}  // namespace handcept::metrics
