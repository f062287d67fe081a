#include "handcept/sim/scenario.hpp"

#include <numbers>

namespace handcept::sim {
namespace {

constexpr double kRad = std::numbers::pi / 180.0;

}  // namespace

ImuModel default_imu_model() {
  ImuModel m;
  m.rate_hz = 200.0;
  m.orientation_noise_std = 0.5 * kRad;
  m.bias_walk_std = 0.0;
  m.initial_bias_spread = 0.25 * kRad;
  m.bias_drift_rate = 4e-3 * kRad;
  return m;
}

CameraModel default_camera_model() {
  CameraModel m;
  m.rate_hz = 30.0;
  m.orientation_noise_std = 1.0 * kRad;
  m.latency_ticks = 20;
  m.dropout_prob = 0.0;
  return m;
}

Scenario simulate_scenario(const kin::KinematicChain& chain, const ScenarioConfig& config) {
  Scenario s;
  const TrajectoryProfile profile =
      random_profile(chain, config.duration_s, config.imu.rate_hz, config.seed, config.motion);
  s.truth = generate_trajectory(chain, profile);
  s.imu = simulate_imu_stream(s.truth, config.imu, config.seed);
  s.camera = simulate_camera_stream(s.truth, config.camera, config.seed);
  s.merged = merge_streams(s.imu.events, s.camera);
  return s;
}

}  // namespace handcept::sim
