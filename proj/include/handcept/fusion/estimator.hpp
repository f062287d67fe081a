#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "handcept/fusion/history.hpp"
#include "handcept/kin/chain.hpp"
#include "handcept/sim/sensors.hpp"

namespace handcept::fusion {

enum class FusionMode { ImuOnly, CamOnly, Fused };

std::string_view to_string(FusionMode mode);
FusionMode parse_mode(std::string_view name);

struct EstimatorOptions {
  NoiseConfig noise;
  InitConfig init;
  std::size_t buffer_capacity = kDefaultHistoryCapacity;
  // Track quaternion norm and covariance eigenvalues after every step.
  bool check_invariants = false;
};

struct FusionEstimate {
  Tick tick = 0;
  FusionMode mode = FusionMode::Fused;
  std::vector<EkfState> links;  // sensor order
  kin::JointAngles angles;      // rad, chain order
  double solver_residual = 0.0;
};

struct FusionDiagnostics {
  std::size_t imu_events = 0;
  std::size_t camera_events = 0;
  std::size_t refits = 0;
  std::size_t stale_frames = 0;   // older than the history tail, dropped
  std::size_t future_frames = 0;  // captured after the live tick, rejected
  std::size_t missing_frames = 0; // capture tick absent from the history
  std::size_t skipped_updates = 0;
  double max_condition_number = 0.0;
  // Meaningful only with EstimatorOptions::check_invariants.
  double max_norm_error = 0.0;
  double min_cov_eigenvalue = 0.0;
};

/// Event-driven estimator for all tracked links of a chain. Events must be
/// pushed in arrival order; one estimate is produced per IMU tick once every
/// event arriving at that tick has been seen.
class Estimator {
 public:
  Estimator(const kin::KinematicChain& chain, FusionMode mode, const EstimatorOptions& options = {});

  // Returns the estimate for the previous IMU tick when `event` opens a new
  // arrival tick. Throws std::invalid_argument on out-of-order events or an
  // unknown sensor id.
  std::optional<FusionEstimate> push(const sim::MeasurementEvent& event);
  std::optional<FusionEstimate> finish();

  FusionDiagnostics diagnostics() const;
  const LinkFilter& link_filter(std::size_t sensor) const { return filters_.at(sensor); }

 private:
  std::optional<FusionEstimate> close_tick();
  FusionEstimate make_estimate(Tick tick);

  const kin::KinematicChain& chain_;
  std::vector<kin::Segment> segments_;
  FusionMode mode_;
  EstimatorOptions options_;
  std::vector<LinkFilter> filters_;
  std::optional<Tick> open_tick_;
  bool open_has_imu_ = false;
  kin::JointAngles prev_angles_;
  FusionDiagnostics diag_;
};

struct EstimatorRun {
  std::vector<FusionEstimate> estimates;
  FusionDiagnostics diagnostics;
};

EstimatorRun run_estimator(std::span<const sim::MeasurementEvent> events, const kin::KinematicChain& chain,
                           FusionMode mode, const EstimatorOptions& options = {});

}  // namespace handcept::fusion
