#include "handcept/fusion/estimator.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "handcept/kin/constraints.hpp"

namespace handcept::fusion {

std::string_view to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::ImuOnly:
      return "imu_only";
    case FusionMode::CamOnly:
      return "cam_only";
    case FusionMode::Fused:
      return "fused";
  }
  return "unknown";
}

FusionMode parse_mode(std::string_view name) {
  if (name == "imu_only") return FusionMode::ImuOnly;
  if (name == "cam_only") return FusionMode::CamOnly;
  if (name == "fused") return FusionMode::Fused;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected imu_only, cam_only or fused)");
}

Estimator::Estimator(const kin::KinematicChain& chain, FusionMode mode, const EstimatorOptions& options)
    : chain_(chain), segments_(chain.segments()), mode_(mode), options_(options),
      prev_angles_(chain.size(), 0.0) {
  const std::size_t n = chain.tracked_links().size();
  filters_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    filters_.emplace_back(options.noise, options.init, options.buffer_capacity, options.check_invariants);
  }
}

std::optional<FusionEstimate> Estimator::push(const sim::MeasurementEvent& event) {
  if (event.sensor_id < 0 || static_cast<std::size_t>(event.sensor_id) >= filters_.size()) {
    throw std::invalid_argument("unknown sensor id " + std::to_string(event.sensor_id));
  }
  if (event.arrives_at < event.measured_at) {
    throw std::invalid_argument("event arrives before it was measured");
  }
  std::optional<FusionEstimate> out;
  if (open_tick_ && event.arrives_at < *open_tick_) {
    throw std::invalid_argument("events must be ordered by arrival tick");
  }
  if (!open_tick_ || event.arrives_at > *open_tick_) {
    out = close_tick();
    open_tick_ = event.arrives_at;
    open_has_imu_ = false;
  }

  LinkFilter& f = filters_[static_cast<std::size_t>(event.sensor_id)];
  if (event.kind == sim::SensorKind::Imu) {
    if (event.measured_at != event.arrives_at) {
      throw std::invalid_argument("IMU events must arrive at their measurement tick");
    }
    ++diag_.imu_events;
    open_has_imu_ = true;
    if (f.initialized() && event.measured_at <= f.live_tick()) {
      throw std::invalid_argument("duplicate IMU event for sensor " + std::to_string(event.sensor_id));
    }
    const bool use = mode_ != FusionMode::CamOnly || !f.initialized();
    f.advance(event.measured_at, use ? std::optional(event.payload) : std::nullopt);
    return out;
  }

  ++diag_.camera_events;
  if (mode_ == FusionMode::ImuOnly) {
    return out;
  }
  if (!f.initialized()) {
    ++diag_.stale_frames;
    return out;
  }
  if (f.live_tick() < event.arrives_at) {
    f.advance(event.arrives_at, std::nullopt);
  }
  if (mode_ == FusionMode::CamOnly) {
    f.apply_camera_now(event.payload);
    return out;
  }
  const RefitResult r = f.retrospective_refit(event.measured_at, event.payload);
  switch (r.status) {
    case RefitStatus::Applied:
      ++diag_.refits;
      break;
    case RefitStatus::Stale:
      ++diag_.stale_frames;
      break;
    case RefitStatus::Future:
      ++diag_.future_frames;
      break;
    case RefitStatus::Missing:
      ++diag_.missing_frames;
      break;
  }
  return out;
}

std::optional<FusionEstimate> Estimator::close_tick() {
  if (!open_tick_ || !open_has_imu_) {
    return std::nullopt;
  }
  const Tick tick = *open_tick_;
  for (LinkFilter& f : filters_) {
    if (f.initialized() && f.live_tick() < tick) {
      f.advance(tick, std::nullopt);
    }
  }
  open_has_imu_ = false;
  return make_estimate(tick);
}

std::optional<FusionEstimate> Estimator::finish() { return close_tick(); }

FusionEstimate Estimator::make_estimate(Tick tick) {
  FusionEstimate e;
  e.tick = tick;
  e.mode = mode_;
  std::vector<kin::RotationMatrix3> rotations;
  rotations.reserve(filters_.size());
  for (const LinkFilter& f : filters_) {
    const EkfState s = f.initialized() ? f.live().state : EkfState{};
    e.links.push_back(s);
    rotations.push_back(rot::quat_to_matrix(s.q));
  }
  const kin::ChainSolveReport report = kin::solve_joint_angles(chain_, segments_, rotations, prev_angles_);
  e.angles = report.angles;
  e.solver_residual = report.max_residual;
  prev_angles_ = e.angles;
  return e;
}

FusionDiagnostics Estimator::diagnostics() const {
  FusionDiagnostics d = diag_;
  d.min_cov_eigenvalue = std::numeric_limits<double>::infinity();
  for (const LinkFilter& f : filters_) {
    const StepStats& s = f.stats();
    d.skipped_updates += s.skipped;
    d.max_condition_number = std::max(d.max_condition_number, s.max_condition);
    d.max_norm_error = std::max(d.max_norm_error, s.max_norm_error);
    d.min_cov_eigenvalue = std::min(d.min_cov_eigenvalue, s.min_cov_eigenvalue);
  }
  if (!options_.check_invariants || filters_.empty()) {
    d.min_cov_eigenvalue = 0.0;
  }
  return d;
}

EstimatorRun run_estimator(std::span<const sim::MeasurementEvent> events, const kin::KinematicChain& chain,
                           FusionMode mode, const EstimatorOptions& options) {
  Estimator est(chain, mode, options);
  EstimatorRun run;
  for (const auto& e : events) {
    if (auto out = est.push(e)) {
      run.estimates.push_back(std::move(*out));
    }
  }
  if (auto out = est.finish()) {
    run.estimates.push_back(std::move(*out));
  }
  run.diagnostics = est.diagnostics();
  return run;
}

}  // namespace handcept::fusion
