#pragma once

#include <cstdint>
#include <vector>

#include "handcept/kin/chain.hpp"
#include "handcept/sim/sensors.hpp"
#include "handcept/sim/trajectory.hpp"

namespace handcept::sim {

/// Sensor presets used by the CLI and the experiment harness: a 9-axis IMU
/// with a per-unit orientation offset and slow bias drift, and a tracking
/// camera that is unbiased but noisier and late.
ImuModel default_imu_model();
CameraModel default_camera_model();

struct ScenarioConfig {
  double duration_s = 120.0;
  std::uint64_t seed = 1;
  ImuModel imu = default_imu_model();
  CameraModel camera = default_camera_model();
  RandomMotionOptions motion;
};

struct Scenario {
  Trajectory truth;
  ImuStream imu;
  std::vector<MeasurementEvent> camera;
  std::vector<MeasurementEvent> merged;  // arrival order
};

// Random joint motion on `chain` observed by both sensor streams, all drawn
// from config.seed.
Scenario simulate_scenario(const kin::KinematicChain& chain, const ScenarioConfig& config);

}  // namespace handcept::sim
