#include "handcept/sim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace handcept::sim {
namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t sensor) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(sensor)};
  return std::mt19937_64(seq);
}

Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {n(rng), n(rng), n(rng)};
  } while (v.norm() < 1e-9);
  return v.normalized();
}

}  // namespace

rot::UnitQuaternion random_rotation_noise(std::mt19937_64& rng, double std) {
  const Eigen::Vector3d axis = random_unit(rng);
  std::normal_distribution<double> angle(0.0, std);
  return rot::UnitQuaternion::from_axis_angle(axis, angle(rng));
}

ImuStream simulate_imu_stream(const Trajectory& truth, const ImuModel& model, std::uint64_t seed) {
  if (!(model.rate_hz > 0.0) || model.orientation_noise_std < 0.0 || model.bias_walk_std < 0.0 ||
      model.initial_bias_spread < 0.0) {
    throw std::invalid_argument("invalid IMU model");
  }
  const std::size_t sensors = truth.link_count();
  const std::size_t n = truth.samples.size();
  const double dt = 1.0 / model.rate_hz;

  ImuStream out;
  out.bias_trace.assign(sensors, {});
  std::vector<std::vector<rot::UnitQuaternion>> readings(sensors);

  for (std::size_t s = 0; s < sensors; ++s) {
    auto rng = stream_rng(seed, 1, s);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    Eigen::Vector3d bias = model.initial_bias;
    for (int a = 0; a < 3; ++a) {
      bias[a] += model.initial_bias_spread * unit_normal(rng);
    }
    const Eigen::Vector3d drift = model.bias_drift_rate * random_unit(rng);
    const double walk = model.bias_walk_std * std::sqrt(dt);

    auto& trace = out.bias_trace[s];
    auto& z = readings[s];
    trace.reserve(n);
    z.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      rot::UnitQuaternion q = truth.samples[i].links[s];
      if (!bias.isZero(0.0)) {
        q = q * rot::UnitQuaternion(1.0, 0.5 * bias.x(), 0.5 * bias.y(), 0.5 * bias.z());
      }
      const rot::UnitQuaternion noise = random_rotation_noise(rng, model.orientation_noise_std);
      if (model.orientation_noise_std > 0.0) {
        q = q * noise;
      }
      trace.push_back(bias);
      z.push_back(q);
      for (int a = 0; a < 3; ++a) {
        bias[a] += drift[a] * dt + walk * unit_normal(rng);
      }
    }
  }

  out.events.reserve(n * sensors);
  for (std::size_t i = 0; i < n; ++i) {
    const Tick tick = truth.samples[i].tick;
    for (std::size_t s = 0; s < sensors; ++s) {
      out.events.push_back({static_cast<int>(s), SensorKind::Imu, tick, tick, readings[s][i]});
    }
  }
  return out;
}

std::vector<Tick> camera_capture_ticks(Tick tick_count, double imu_rate_hz, double cam_rate_hz) {
  if (!(cam_rate_hz > 0.0) || cam_rate_hz > imu_rate_hz) {
    throw std::invalid_argument("camera rate " + std::to_string(cam_rate_hz) +
                                " Hz must be positive and at most the IMU rate " +
                                std::to_string(imu_rate_hz) + " Hz");
  }
  std::vector<Tick> ticks;
  for (std::int64_t n = 0;; ++n) {
    const auto tick =
        static_cast<Tick>(std::floor(static_cast<double>(n) * imu_rate_hz / cam_rate_hz + 1e-9));
    if (tick >= tick_count) {
      break;
    }
    ticks.push_back(tick);
  }
  return ticks;
}

std::vector<MeasurementEvent> simulate_camera_stream(const Trajectory& truth, const CameraModel& model,
                                                     std::uint64_t seed) {
  if (model.latency_ticks < 0 || model.orientation_noise_std < 0.0 || model.dropout_prob < 0.0 ||
      model.dropout_prob >= 1.0) {
    throw std::invalid_argument("invalid camera model");
  }
  const auto n = static_cast<Tick>(truth.samples.size());
  const std::size_t sensors = truth.link_count();
  auto frame_rng = stream_rng(seed, 2, 0);
  std::vector<std::mt19937_64> noise_rng;
  for (std::size_t s = 0; s < sensors; ++s) {
    noise_rng.push_back(stream_rng(seed, 3, s));
  }
  std::bernoulli_distribution drop(model.dropout_prob);

  std::vector<MeasurementEvent> out;
  for (Tick tick : camera_capture_ticks(n, truth.rate_hz, model.rate_hz)) {
    const bool dropped = drop(frame_rng);
    const Tick arrives = tick + model.latency_ticks;
    if (dropped || arrives >= n) {
      continue;
    }
    const auto& sample = truth.samples[static_cast<std::size_t>(tick)];
    for (std::size_t s = 0; s < sensors; ++s) {
      rot::UnitQuaternion q = sample.links[s];
      const rot::UnitQuaternion noise = random_rotation_noise(noise_rng[s], model.orientation_noise_std);
      if (model.orientation_noise_std > 0.0) {
        q = q * noise;
      }
      out.push_back({static_cast<int>(s), SensorKind::Camera, sample.tick, sample.tick + model.latency_ticks, q});
    }
  }
  return out;
}

bool arrival_order_less(const MeasurementEvent& a, const MeasurementEvent& b) {
  if (a.arrives_at != b.arrives_at) {
    return a.arrives_at < b.arrives_at;
  }
  if (a.kind != b.kind) {
    return a.kind == SensorKind::Imu;
  }
  if (a.measured_at != b.measured_at) {
    return a.measured_at < b.measured_at;
  }
  return a.sensor_id < b.sensor_id;
}

std::vector<MeasurementEvent> merge_streams(std::span<const MeasurementEvent> imu,
                                            std::span<const MeasurementEvent> camera) {
  std::vector<MeasurementEvent> out;
  out.reserve(imu.size() + camera.size());
  out.insert(out.end(), imu.begin(), imu.end());
  out.insert(out.end(), camera.begin(), camera.end());
  std::stable_sort(out.begin(), out.end(), arrival_order_less);
  return out;
}

}  // namespace handcept::sim
