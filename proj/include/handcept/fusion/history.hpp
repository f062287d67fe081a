#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "handcept/fusion/ekf.hpp"
#include "handcept/sim/trajectory.hpp"

namespace handcept::fusion {

using sim::Tick;

struct HistoryRecord {
  Tick tick = 0;
  Belief prior;      // after prediction, before this tick's measurements
  Belief posterior;  // after this tick's measurements
  std::optional<rot::UnitQuaternion> z_imu;
  std::optional<rot::UnitQuaternion> z_cam;  // set once a delayed frame is folded in
};

inline constexpr std::size_t kDefaultHistoryCapacity = 256;

/// Bounded history of per-tick beliefs, oldest first. Ticks are strictly
/// increasing; pushing past capacity evicts the oldest record.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(std::size_t capacity = kDefaultHistoryCapacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Throws std::invalid_argument if record.tick does not follow the newest.
  void push(HistoryRecord record);

  const HistoryRecord& front() const { return records_.front(); }
  const HistoryRecord& back() const { return records_.back(); }
  const HistoryRecord& operator[](std::size_t i) const { return records_[i]; }
  HistoryRecord& operator[](std::size_t i) { return records_[i]; }

  std::optional<std::size_t> find(Tick tick) const;

 private:
  std::size_t capacity_;
  std::deque<HistoryRecord> records_;
};

enum class RefitStatus { Applied, Stale, Future, Missing };

struct RefitResult {
  RefitStatus status = RefitStatus::Applied;
  std::size_t replayed = 0;   // ticks re-run after the frame's own tick
  std::size_t skipped = 0;    // updates refused for conditioning
  double max_condition = 0.0;
};

struct StepStats {
  std::size_t skipped = 0;
  double max_condition = 0.0;
  // Filled only when invariant tracking is on.
  double max_norm_error = 0.0;
  double min_cov_eigenvalue = 0.0;
};

/// EKF for one tracked link with its replay history.
class LinkFilter {
 public:
  LinkFilter(const NoiseConfig& noise, const InitConfig& init, std::size_t capacity = kDefaultHistoryCapacity,
             bool track_invariants = false);

  bool initialized() const { return !history_.empty(); }
  Tick live_tick() const { return history_.back().tick; }
  const Belief& live() const { return history_.back().posterior; }
  const HistoryBuffer& history() const { return history_; }
  const StepStats& stats() const { return stats_; }

  /// Predicts once per elapsed tick up to `tick`, then applies z_imu if given.
  /// The first call initializes from z_imu (or identity) without predicting.
  void advance(Tick tick, const std::optional<rot::UnitQuaternion>& z_imu);

  // Camera update on the live belief, no replay.
  void apply_camera_now(const rot::UnitQuaternion& z_cam);

  /// Folds a frame captured at `measured_at` into the history: joint update at
  /// that tick's prior, then prediction and the buffered updates replayed up
  /// to the live tick.
  RefitResult retrospective_refit(Tick measured_at, const rot::UnitQuaternion& z_cam);

 private:
  void record(const UpdateOutcome& o);
  void check(const Belief& b);
  Belief predict_ticks(Belief b, Tick n) const;
  Belief apply_measurements(Belief b, const HistoryRecord& r);

  NoiseConfig noise_;
  InitConfig init_;
  HistoryBuffer history_;
  bool track_invariants_;
  StepStats stats_;
};

}  // namespace handcept::fusion
