#include "handcept/sim/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace handcept::sim {

double JointMotion::evaluate(double t) const {
  double angle = offset;
  for (const Sinusoid& s : terms) {
    angle += s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency_hz * t + s.phase);
  }
  return angle;
}

double JointMotion::max_excursion() const {
  double sum = 0.0;
  for (const Sinusoid& s : terms) {
    sum += std::abs(s.amplitude);
  }
  return sum;
}

TrajectoryProfile random_profile(const kin::KinematicChain& chain, double duration_s, double rate_hz,
                                 std::uint64_t seed, const RandomMotionOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(options.min_frequency_hz, options.max_frequency_hz);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> share(0.3, 1.0);

  TrajectoryProfile profile;
  profile.duration_s = duration_s;
  profile.rate_hz = rate_hz;
  profile.seed = seed;
  for (const kin::JointSpec& j : chain.joints()) {
    JointMotion motion;
    motion.offset = 0.5 * (j.limits.lower + j.limits.upper);
    const double budget = options.range_fraction * 0.5 * (j.limits.upper - j.limits.lower);
    std::vector<double> weights(options.terms_per_joint);
    double total = 0.0;
    for (double& w : weights) {
      w = share(rng);
      total += w;
    }
    for (double w : weights) {
      motion.terms.push_back({budget * w / total, freq(rng), phase(rng)});
    }
    profile.joints.push_back(std::move(motion));
  }
  return profile;
}

Trajectory generate_trajectory(const kin::KinematicChain& chain, const TrajectoryProfile& profile) {
  if (profile.joints.size() != chain.size()) {
    throw std::invalid_argument("profile has " + std::to_string(profile.joints.size()) +
                                " joint motions for a chain of " + std::to_string(chain.size()));
  }
  if (!(profile.duration_s > 0.0) || !(profile.rate_hz > 0.0)) {
    throw std::invalid_argument("profile duration and rate must be positive");
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& m = profile.joints[i];
    const auto& lim = chain.joint(i).limits;
    if (m.offset - m.max_excursion() < lim.lower || m.offset + m.max_excursion() > lim.upper) {
      throw std::invalid_argument("motion of joint '" + chain.joint(i).name + "' exceeds its limits");
    }
  }

  const auto ticks = static_cast<Tick>(std::llround(profile.duration_s * profile.rate_hz));
  const auto& tracked = chain.tracked_links();
  Trajectory traj;
  traj.rate_hz = profile.rate_hz;
  traj.samples.reserve(static_cast<std::size_t>(ticks));
  for (Tick tick = 0; tick < ticks; ++tick) {
    TruthSample s;
    s.tick = tick;
    s.t = static_cast<double>(tick) / profile.rate_hz;
    s.angles.resize(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      s.angles[i] = profile.joints[i].evaluate(s.t);
    }
    const auto poses = kin::forward_all(chain, s.angles);
    s.links.reserve(tracked.size());
    for (int link : tracked) {
      s.links.push_back(rot::matrix_to_quat(poses[link].rotation));
    }
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

}  // namespace handcept::sim
