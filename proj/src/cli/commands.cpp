#include "handcept/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "handcept/cli/csv.hpp"
#include "handcept/metrics/metrics.hpp"
#include "handcept/sim/packet.hpp"

namespace handcept::cli {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path) {
  const std::string s = read_text_file(path);
  return {s.begin(), s.end()};
}

std::vector<sim::MeasurementEvent> load_stream(const std::filesystem::path& path) {
  const auto bytes = read_binary(path);
  const sim::StreamDecodeResult r = sim::decode_stream(bytes);
  if (r.error) {
    throw ValidationError(fmt::format("{}: {} frame at byte {}", path.string(), sim::to_string(*r.error),
                                      r.error_offset));
  }
  return r.events;
}

// Per-sensor readings of an IMU file, ordered by tick.
std::map<int, std::vector<sim::MeasurementEvent>> by_sensor(std::vector<sim::MeasurementEvent> events) {
  std::map<int, std::vector<sim::MeasurementEvent>> out;
  for (auto& e : events) {
    out[e.sensor_id].push_back(e);
  }
  for (auto& [id, list] : out) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.measured_at < b.measured_at; });
  }
  return out;
}

}  // namespace

void cmd_simulate(const RunConfig& config) {
  validate_run_config(config);
  const kin::KinematicChain chain = load_chain(config);
  sim::ScenarioConfig sc;
  sc.duration_s = config.duration_s;
  sc.seed = config.seed;
  sc.imu = config.imu;
  sc.camera = config.camera;
  sc.motion = config.motion;
  sim::Scenario s;
  try {
    s = sim::simulate_scenario(chain, sc);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  spdlog::info("simulated {} ticks, {} IMU and {} camera events", s.truth.samples.size(), s.imu.events.size(),
               s.camera.size());
  write_text_file(config.out_dir / "truth.csv", format_truth(s.truth));
  write_text_file(config.out_dir / "imu.csv", format_events(s.imu.events));
  write_text_file(config.out_dir / "cam.csv", format_events(s.camera));
  const auto bytes = sim::encode_stream(s.merged);
  write_text_file(config.out_dir / "stream.hcp",
                  std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

fusion::FusionDiagnostics cmd_fuse(const RunConfig& config, const FuseInputs& in) {
  validate_run_config(config);
  const kin::KinematicChain chain = load_chain(config);
  const bool wants_camera = config.mode != fusion::FusionMode::ImuOnly;

  std::vector<sim::MeasurementEvent> events;
  if (!in.stream.empty()) {
    events = load_stream(in.stream);
    if (!wants_camera) {
      std::erase_if(events, [](const auto& e) { return e.kind == sim::SensorKind::Camera; });
    }
  } else {
    if (in.imu.empty()) {
      throw ValidationError("fuse needs --imu or --stream");
    }
    const auto imu = read_events(in.imu, sim::SensorKind::Imu);
    std::vector<sim::MeasurementEvent> cam;
    if (wants_camera) {
      if (in.cam.empty()) {
        throw ValidationError(fmt::format("mode {} needs --cam", fusion::to_string(config.mode)));
      }
      cam = read_events(in.cam, sim::SensorKind::Camera);
    }
    events = sim::merge_streams(imu, cam);
  }

  fusion::EstimatorRun run;
  try {
    run = fusion::run_estimator(events, chain, config.mode, config.estimator);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }

  std::optional<TruthTable> truth;
  std::unordered_map<sim::Tick, std::size_t> truth_row;
  if (!in.truth.empty()) {
    truth = read_truth(in.truth);
    for (std::size_t i = 0; i < truth->ticks.size(); ++i) truth_row[truth->ticks[i]] = i;
  }

  std::string out = "tick,mode";
  for (std::size_t j = 0; j < chain.size(); ++j) fmt::format_to(std::back_inserter(out), ",joint_{}", j);
  if (truth) {
    for (std::size_t j = 0; j < chain.size(); ++j) fmt::format_to(std::back_inserter(out), ",err_{}", j);
  }
  out += '\n';
  const std::string_view mode = fusion::to_string(config.mode);
  for (const auto& e : run.estimates) {
    fmt::format_to(std::back_inserter(out), "{},{}", e.tick, mode);
    for (double a : e.angles) fmt::format_to(std::back_inserter(out), ",{:.9f}", a * kDeg);
    if (truth) {
      const auto it = truth_row.find(e.tick);
      if (it == truth_row.end() || truth->angles[it->second].size() != e.angles.size()) {
        throw ValidationError(fmt::format("truth has no matching row for tick {}", e.tick));
      }
      for (std::size_t j = 0; j < e.angles.size(); ++j) {
        fmt::format_to(std::back_inserter(out), ",{:.9f}",
                       metrics::wrapped_error_deg(e.angles[j], truth->angles[it->second][j]));
      }
    }
    out += '\n';
  }
  write_text_file(config.out_dir / "est.csv", out);

  const auto& d = run.diagnostics;
  std::string diag = "key,value\n";
  fmt::format_to(std::back_inserter(diag),
                 "mode,{}\nestimates,{}\nimu_events,{}\ncamera_events,{}\nrefits,{}\nstale_frames,{}\n"
                 "future_frames,{}\nmissing_frames,{}\nskipped_updates,{}\nmax_condition_number,{:.6e}\n",
                 mode, run.estimates.size(), d.imu_events, d.camera_events, d.refits, d.stale_frames,
                 d.future_frames, d.missing_frames, d.skipped_updates, d.max_condition_number);
  write_text_file(config.out_dir / "diagnostics.csv", diag);
  spdlog::info("fused {} ticks in mode {}, {} refits, {} stale frames", run.estimates.size(), mode, d.refits,
               d.stale_frames);
  return d;
}

void cmd_drift(const RunConfig& config, const std::filesystem::path& imu_csv, bool raw) {
  validate_run_config(config);
  const auto sensors = by_sensor(read_events(imu_csv, sim::SensorKind::Imu));
  if (sensors.empty()) {
    throw ValidationError(imu_csv.string() + ": no samples");
  }
  std::vector<double> t;
  std::vector<std::vector<rot::UnitQuaternion>> streams;
  for (const auto& [id, list] : sensors) {
    std::vector<double> ts;
    std::vector<rot::UnitQuaternion> qs;
    fusion::LinkFilter filter(config.estimator.noise, config.estimator.init, config.estimator.buffer_capacity);
    for (const auto& e : list) {
      ts.push_back(static_cast<double>(e.measured_at) / config.imu.rate_hz);
      if (raw) {
        qs.push_back(e.payload);
      } else {
        if (filter.initialized() && e.measured_at <= filter.live_tick()) {
          throw ValidationError(fmt::format("sensor {} repeats tick {}", id, e.measured_at));
        }
        filter.advance(e.measured_at, e.payload);
        qs.push_back(filter.live().state.q);
      }
    }
    if (streams.empty()) {
      t = ts;
    } else if (ts != t) {
      throw ValidationError(fmt::format("sensor {} is not sampled on the same ticks as sensor {}", id,
                                        sensors.begin()->first));
    }
    streams.push_back(std::move(qs));
  }
  metrics::DriftReport report;
  try {
    report = metrics::orientation_drift(t, streams);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  std::string out = "axis,slope_deg_per_s,intercept_deg,rms_deg\n";
  for (const auto& a : report.axes) {
    fmt::format_to(std::back_inserter(out), "{},{:.9e},{:.9f},{:.9f}\n", a.axis, a.slope_deg_per_s, a.intercept_deg,
                   a.rms_deg);
  }
  write_text_file(config.out_dir / "drift.csv", out);
}

void cmd_uniformity(const RunConfig& config, const std::vector<std::filesystem::path>& inputs) {
  if (inputs.empty()) {
    throw ValidationError("uniformity needs at least one imu.csv");
  }
  std::map<int, std::vector<rot::UnitQuaternion>> sets;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto& set = sets[static_cast<int>(i) + 1];
    for (const auto& e : read_events(inputs[i], sim::SensorKind::Imu)) {
      set.push_back(e.payload);
    }
  }
  std::vector<metrics::PoseVariance> report;
  try {
    report = metrics::uniformity_report(sets);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  std::string out = "pose,variance_deg2\n";
  for (const auto& p : report) {
    fmt::format_to(std::back_inserter(out), "{},{:.9f}\n", p.pose, p.variance_deg2);
  }
  write_text_file(config.out_dir / "var.csv", out);
}

rot::EulerAngles cmd_euler(std::string_view matrix, std::string_view sequence, std::string_view prev) {
  std::vector<double> v;
  std::string cleaned(matrix);
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < cleaned.size() && cleaned[i] != ' ') ++i;
    if (i > start) v.push_back(parse_number(std::string_view(cleaned).substr(start, i - start)));
  }
  if (v.size() != 9) {
    throw ValidationError(fmt::format("matrix needs 9 numbers, got {}", v.size()));
  }
  rot::RotationMatrix3 r;
  r << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  if (rot::orthonormality_residual(r) > 1e-6) {
    throw ValidationError("matrix is not a rotation");
  }
  rot::EulerSequence seq;
  try {
    seq = rot::parse_sequence(sequence);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  rot::EulerAngles p{0.0, 0.0, 0.0, seq};
  if (!prev.empty()) {
    std::vector<double> a;
    std::size_t start = 0;
    while (true) {
      const auto pos = prev.find(',', start);
      a.push_back(parse_angle(prev.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (a.size() != 3) {
      throw ValidationError("prev needs three angles");
    }
    p = {a[0], a[1], a[2], seq};
  }
  return rot::matrix_to_euler_continuous(r, p, seq);
}

void cmd_compare(const RunConfig& config, const std::filesystem::path& truth_path,
                 const std::vector<std::filesystem::path>& estimates) {
  if (estimates.empty()) {
    throw ValidationError("compare needs at least one estimate file");
  }
  const TruthTable truth = read_truth(truth_path);
  std::unordered_map<sim::Tick, std::size_t> row;
  for (std::size_t i = 0; i < truth.ticks.size(); ++i) row[truth.ticks[i]] = i;

  std::string out = "source,mode,joint,rmse_deg,max_deg,slope_deg_per_s\n";
  for (const auto& path : estimates) {
    const EstimateTable est = read_estimates(path);
    std::vector<double> t;
    std::vector<kin::JointAngles> ref;
    for (sim::Tick tick : est.ticks) {
      const auto it = row.find(tick);
      if (it == row.end()) {
        throw ValidationError(fmt::format("{}: tick {} is absent from the truth file", path.string(), tick));
      }
      t.push_back(truth.t_s[it->second]);
      ref.push_back(truth.angles[it->second]);
    }
    metrics::ErrorReport r;
    try {
      r = metrics::joint_angle_error(t, est.angles, ref, est.mode);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
    const std::string source = path.generic_string();
    for (std::size_t j = 0; j < r.joints.size(); ++j) {
      const auto& je = r.joints[j];
      fmt::format_to(std::back_inserter(out), "{},{},{},{:.9f},{:.9f},{:.9e}\n", source, r.mode, j, je.rmse_deg,
                     je.max_deg, je.slope_deg_per_s);
    }
    double max_all = 0.0;
    for (const auto& je : r.joints) max_all = std::max(max_all, je.max_deg);
    fmt::format_to(std::back_inserter(out), "{},{},mean,{:.9f},{:.9f},{:.9e}\n", source, r.mode, r.mean_rmse_deg,
                   max_all, r.mean_slope_deg_per_s);
  }
  write_text_file(config.out_dir / "report.csv", out);
}

}  // namespace handcept::cli
