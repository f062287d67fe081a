#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "handcept/rot/quaternion.hpp"
#include "handcept/sim/trajectory.hpp"

namespace handcept::sim {

enum class SensorKind : std::uint8_t { Imu = 0, Camera = 1 };

/// One orientation reading for one tracked link. Camera readings carry their
/// capture tick in measured_at and become available at arrives_at.
struct MeasurementEvent {
  int sensor_id = 0;
  SensorKind kind = SensorKind::Imu;
  Tick measured_at = 0;
  Tick arrives_at = 0;
  rot::UnitQuaternion payload;

  bool operator==(const MeasurementEvent&) const = default;
};

/// Orientation-output IMU with a slowly wandering bias:
///   b_{t+1} = b_t + drift * dt + eta,  eta ~ N(0, bias_walk_std^2 dt)
///   z_t = truth_t (x) normalize([1, b_t / 2]) (x) noise
/// Each sensor starts at initial_bias plus an N(0, initial_bias_spread^2)
/// per-axis offset and drifts at bias_drift_rate along its own random
/// direction.
struct ImuModel {
  double rate_hz = 200.0;
  double orientation_noise_std = 0.0;  // rad
  double bias_walk_std = 0.0;          // rad / sqrt(s), per axis
  Eigen::Vector3d initial_bias = Eigen::Vector3d::Zero();  // rad
  double initial_bias_spread = 0.0;    // rad, per axis
  double bias_drift_rate = 0.0;        // rad / s
};

struct CameraModel {
  double rate_hz = 30.0;
  double orientation_noise_std = 0.0;  // rad
  Tick latency_ticks = 0;
  double dropout_prob = 0.0;
};

struct ImuStream {
  std::vector<MeasurementEvent> events;  // tick-major, sensor order within a tick
  // bias_trace[sensor][sample]
  std::vector<std::vector<Eigen::Vector3d>> bias_trace;
};

// Small rotation about a uniformly random axis with angle ~ N(0, std).
rot::UnitQuaternion random_rotation_noise(std::mt19937_64& rng, double std);

ImuStream simulate_imu_stream(const Trajectory& truth, const ImuModel& model, std::uint64_t seed);

// Capture ticks are floor(n * imu_rate / cam_rate). Frames whose arrival
// would fall after the last truth tick are not emitted. Throws
// std::invalid_argument for a camera rate above the IMU rate.
std::vector<MeasurementEvent> simulate_camera_stream(const Trajectory& truth, const CameraModel& model,
                                                     std::uint64_t seed);

std::vector<Tick> camera_capture_ticks(Tick tick_count, double imu_rate_hz, double cam_rate_hz);

// Sorted by arrives_at; ties IMU before camera, then measured_at, then sensor.
std::vector<MeasurementEvent> merge_streams(std::span<const MeasurementEvent> imu,
                                            std::span<const MeasurementEvent> camera);

bool arrival_order_less(const MeasurementEvent& a, const MeasurementEvent& b);

}  // namespace handcept::sim
