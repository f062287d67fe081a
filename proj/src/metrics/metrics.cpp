#include "handcept/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "handcept/rot/euler.hpp"
#include "handcept/rot/statistics.hpp"

namespace handcept::metrics {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

}  // namespace

LineFit fit_line(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) {
    throw std::invalid_argument("fit_line: time and value series differ in length");
  }
  if (t.size() < 2) {
    throw std::invalid_argument("fit_line: at least two samples required");
  }
  const auto n = static_cast<double>(t.size());
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t_mean += t[i];
    y_mean += y[i];
  }
  t_mean /= n;
  y_mean /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - t_mean;
    stt += dt * dt;
    sty += dt * (y[i] - y_mean);
  }
  if (!(stt > 0.0)) {
    throw std::invalid_argument("fit_line: timestamps are all identical");
  }
  LineFit fit;
  fit.slope = sty / stt;
  fit.intercept = y_mean - fit.slope * t_mean;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * t[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

DriftReport fit_first_order_drift(std::span<const double> t_s, std::span<const Eigen::Vector3d> angles_deg,
                                  const std::vector<std::string>& axis_names) {
  if (axis_names.size() != 3) {
    throw std::invalid_argument("fit_first_order_drift: three axis names required");
  }
  DriftReport report;
  std::vector<double> y(angles_deg.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < angles_deg.size(); ++i) {
      y[i] = angles_deg[i][a];
    }
    const LineFit f = fit_line(t_s, y);
    report.axes.push_back({axis_names[static_cast<std::size_t>(a)], f.slope, f.intercept, f.rms});
  }
  return report;
}

std::vector<Eigen::Vector3d> unwrapped_rpy_deg(std::span<const rot::UnitQuaternion> orientations) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(orientations.size());
  rot::EulerAngles prev{0.0, 0.0, 0.0, rot::EulerSequence::ZYX};
  Eigen::Vector3d unwrapped = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < orientations.size(); ++i) {
    const rot::EulerAngles e =
        rot::matrix_to_euler_continuous(rot::quat_to_matrix(orientations[i]), prev, rot::EulerSequence::ZYX);
    // roll = gamma (x), pitch = beta (y), yaw = alpha (z)
    const Eigen::Vector3d now(e.gamma, e.beta, e.alpha);
    if (i == 0) {
      unwrapped = now;
    } else {
      const Eigen::Vector3d before(prev.gamma, prev.beta, prev.alpha);
      for (int a = 0; a < 3; ++a) {
        unwrapped[a] += rot::wrap_angle(now[a] - before[a]);
      }
    }
    prev = e;
    out.push_back(unwrapped * kDeg);
  }
  return out;
}

DriftReport orientation_drift(std::span<const double> t_s,
                              const std::vector<std::vector<rot::UnitQuaternion>>& streams) {
  if (streams.empty()) {
    throw std::invalid_argument("orientation_drift: no streams");
  }
  std::vector<Eigen::Vector3d> mean(t_s.size(), Eigen::Vector3d::Zero());
  for (const auto& s : streams) {
    if (s.size() != t_s.size()) {
      throw std::invalid_argument("orientation_drift: stream length differs from the time base");
    }
    const auto rpy = unwrapped_rpy_deg(s);
    for (std::size_t i = 0; i < rpy.size(); ++i) {
      mean[i] += rpy[i] / static_cast<double>(streams.size());
    }
  }
  return fit_first_order_drift(t_s, mean);
}

bool ErrorReport::drift_free() const { return std::abs(mean_slope_deg_per_s) <= kDriftFreeSlopeDegPerS; }

double wrapped_error_deg(double est_rad, double truth_rad) {
  double d = std::remainder((est_rad - truth_rad) * kDeg, 360.0);
  if (d <= -180.0) {
    d += 360.0;
  }
  return d;
}

ErrorReport joint_angle_error(std::span<const double> t_s, std::span<const kin::JointAngles> est,
                              std::span<const kin::JointAngles> truth, std::string mode) {
  if (est.size() != truth.size() || est.size() != t_s.size()) {
    throw std::invalid_argument("joint_angle_error: estimate, truth and time series differ in length");
  }
  if (est.empty()) {
    throw std::invalid_argument("joint_angle_error: empty series");
  }
  const std::size_t joints = truth.front().size();
  ErrorReport report;
  report.mode = std::move(mode);
  report.joints.resize(joints);
  std::vector<std::vector<double>> magnitude(joints, std::vector<double>(est.size()));
  std::vector<double> mean_magnitude(est.size(), 0.0);
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (est[i].size() != joints || truth[i].size() != joints) {
      throw std::invalid_argument("joint_angle_error: joint count changes between rows");
    }
    for (std::size_t j = 0; j < joints; ++j) {
      const double e = std::abs(wrapped_error_deg(est[i][j], truth[i][j]));
      magnitude[j][i] = e;
      mean_magnitude[i] += e / static_cast<double>(joints);
      report.joints[j].rmse_deg += e * e;
      report.joints[j].max_deg = std::max(report.joints[j].max_deg, e);
    }
  }
  const bool fit = est.size() >= 2;
  for (std::size_t j = 0; j < joints; ++j) {
    JointError& je = report.joints[j];
    je.rmse_deg = std::sqrt(je.rmse_deg / static_cast<double>(est.size()));
    je.slope_deg_per_s = fit ? fit_line(t_s, magnitude[j]).slope : 0.0;
    report.mean_rmse_deg += je.rmse_deg / static_cast<double>(joints);
  }
  report.mean_slope_deg_per_s = fit ? fit_line(t_s, mean_magnitude).slope : 0.0;
  return report;
}

std::vector<PoseVariance> uniformity_report(const std::map<int, std::vector<rot::UnitQuaternion>>& sets) {
  std::vector<PoseVariance> out;
  for (const auto& [pose, samples] : sets) {
    if (samples.empty()) {
      throw std::invalid_argument("uniformity_report: pose " + std::to_string(pose) + " has no samples");
    }
    const rot::QuaternionMean m = rot::quat_mean(samples);
    const rot::AngularStats s = rot::angular_variance(samples, m.mean);
    out.push_back({pose, s.variance_deg2, samples.size(), m.unique});
  }
  return out;
}

}  // namespace handcept::metrics
