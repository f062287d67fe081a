#pragma once

#include <cstdint>
#include <vector>

#include "handcept/kin/chain.hpp"
#include "handcept/rot/quaternion.hpp"

namespace handcept::sim {

// Time is counted in IMU ticks.
using Tick = std::int64_t;

struct Sinusoid {
  double amplitude = 0.0;  // rad
  double frequency_hz = 0.0;
  double phase = 0.0;  // rad
};

// angle(t) = offset + sum_i A_i sin(2 pi f_i t + phase_i)
struct JointMotion {
  double offset = 0.0;
  std::vector<Sinusoid> terms;

  double evaluate(double t) const;
  double max_excursion() const;  // offset +/- sum of |A_i| bounds
};

struct TrajectoryProfile {
  std::vector<JointMotion> joints;
  double duration_s = 1.0;
  double rate_hz = 200.0;
  std::uint64_t seed = 0;
};

struct RandomMotionOptions {
  int terms_per_joint = 2;
  double min_frequency_hz = 0.05;
  double max_frequency_hz = 0.3;
  // Fraction of each joint's half-range used for the summed amplitudes.
  double range_fraction = 0.35;
};

// Per-joint sums of sinusoids centered in each joint's limits, drawn from
// `seed`.
TrajectoryProfile random_profile(const kin::KinematicChain& chain, double duration_s, double rate_hz,
                                 std::uint64_t seed, const RandomMotionOptions& options = {});

struct TruthSample {
  Tick tick = 0;
  double t = 0.0;
  kin::JointAngles angles;
  std::vector<rot::UnitQuaternion> links;  // sensor order
};

struct Trajectory {
  double rate_hz = 200.0;
  std::vector<TruthSample> samples;

  std::size_t link_count() const { return samples.empty() ? 0 : samples.front().links.size(); }
};

// Samples the profile at rate_hz for round(duration * rate) ticks. Throws
// std::invalid_argument when a joint's excursion leaves its limits or the
// profile does not match the chain.
Trajectory generate_trajectory(const kin::KinematicChain& chain, const TrajectoryProfile& profile);

}  // namespace handcept::sim
