#include "handcept/fusion/history.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace handcept::fusion {

HistoryBuffer::HistoryBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("history capacity must be positive");
  }
}

void HistoryBuffer::push(HistoryRecord record) {
  if (!records_.empty() && record.tick <= records_.back().tick) {
    throw std::invalid_argument("history ticks must be strictly increasing");
  }
  records_.push_back(std::move(record));
  if (records_.size() > capacity_) {
    records_.pop_front();
  }
}

std::optional<std::size_t> HistoryBuffer::find(Tick tick) const {
  if (records_.empty() || tick < records_.front().tick || tick > records_.back().tick) {
    return std::nullopt;
  }
  // Ticks are usually contiguous, so try the direct offset first.
  const auto guess = static_cast<std::size_t>(tick - records_.front().tick);
  if (guess < records_.size() && records_[guess].tick == tick) {
    return guess;
  }
  const auto it = std::lower_bound(records_.begin(), records_.end(), tick,
                                   [](const HistoryRecord& r, Tick t) { return r.tick < t; });
  if (it == records_.end() || it->tick != tick) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - records_.begin());
}

LinkFilter::LinkFilter(const NoiseConfig& noise, const InitConfig& init, std::size_t capacity,
                       bool track_invariants)
    : noise_(noise), init_(init), history_(capacity), track_invariants_(track_invariants) {
  noise_.validate();
  stats_.min_cov_eigenvalue = std::numeric_limits<double>::infinity();
}

void LinkFilter::record(const UpdateOutcome& o) {
  if (!o.applied) {
    ++stats_.skipped;
  }
  stats_.max_condition = std::max(stats_.max_condition, o.condition_number);
}

void LinkFilter::check(const Belief& b) {
  if (!track_invariants_) {
    return;
  }
  stats_.max_norm_error = std::max(stats_.max_norm_error, std::abs(b.state.q.coeffs().norm() - 1.0));
  stats_.min_cov_eigenvalue = std::min(stats_.min_cov_eigenvalue, min_eigenvalue(b.cov));
}

Belief LinkFilter::predict_ticks(Belief b, Tick n) const {
  for (Tick i = 0; i < n; ++i) {
    b = predict(b, noise_);
  }
  return b;
}

Belief LinkFilter::apply_measurements(Belief b, const HistoryRecord& r) {
  if (r.z_cam && r.z_imu) {
    record(update_joint(b, *r.z_cam, *r.z_imu, noise_));
  } else if (r.z_cam) {
    record(update_camera(b, *r.z_cam, noise_));
  } else if (r.z_imu) {
    record(update_imu(b, *r.z_imu, noise_));
  }
  check(b);
  return b;
}

void LinkFilter::advance(Tick tick, const std::optional<rot::UnitQuaternion>& z_imu) {
  HistoryRecord r;
  r.tick = tick;
  r.z_imu = z_imu;
  if (history_.empty()) {
    r.prior = initial_belief(z_imu.value_or(rot::UnitQuaternion::identity()), init_);
  } else {
    if (tick <= live_tick()) {
      throw std::invalid_argument("link filter ticks must increase");
    }
    r.prior = predict_ticks(live(), tick - live_tick());
  }
  check(r.prior);
  r.posterior = apply_measurements(r.prior, r);
  history_.push(std::move(r));
}

void LinkFilter::apply_camera_now(const rot::UnitQuaternion& z_cam) {
  HistoryRecord& r = history_[history_.size() - 1];
  record(update_camera(r.posterior, z_cam, noise_));
  check(r.posterior);
}

RefitResult LinkFilter::retrospective_refit(Tick measured_at, const rot::UnitQuaternion& z_cam) {
  RefitResult out;
  if (history_.empty() || measured_at > live_tick()) {
    out.status = RefitStatus::Future;
    return out;
  }
  if (measured_at < history_.front().tick) {
    out.status = RefitStatus::Stale;
    return out;
  }
  const auto start = history_.find(measured_at);
  if (!start) {
    out.status = RefitStatus::Missing;
    return out;
  }
  const std::size_t skipped_before = stats_.skipped;
  const double cond_before = stats_.max_condition;
  stats_.max_condition = 0.0;

  HistoryRecord& first = history_[*start];
  first.z_cam = z_cam;
  first.posterior = apply_measurements(first.prior, first);
  for (std::size_t i = *start + 1; i < history_.size(); ++i) {
    HistoryRecord& r = history_[i];
    r.prior = predict_ticks(history_[i - 1].posterior, r.tick - history_[i - 1].tick);
    check(r.prior);
    r.posterior = apply_measurements(r.prior, r);
    ++out.replayed;
  }

  out.skipped = stats_.skipped - skipped_before;
  out.max_condition = stats_.max_condition;
  stats_.max_condition = std::max(cond_before, out.max_condition);
  return out;
}

}  // namespace handcept::fusion
