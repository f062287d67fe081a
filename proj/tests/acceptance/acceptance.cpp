// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "handcept/fusion/estimator.hpp"
#include "handcept/kin/constraints.hpp"
#include "handcept/metrics/metrics.hpp"
#include "handcept/rot/euler.hpp"
#include "handcept/rot/statistics.hpp"
#include "handcept/sim/scenario.hpp"
#include "../support/generators.hpp"

using namespace handcept;
using namespace handcept::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Invariant bookkeeping shared by every estimator run.
struct InvariantLog {
  std::size_t runs = 0;
  double max_norm_error = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  std::size_t skipped = 0;

  void add(const fusion::FusionDiagnostics& d) {
    ++runs;
    max_norm_error = std::max(max_norm_error, d.max_norm_error);
    min_eigenvalue = std::min(min_eigenvalue, d.min_cov_eigenvalue);
    skipped += d.skipped_updates;
  }
  void add(const fusion::StepStats& s) {
    ++runs;
    max_norm_error = std::max(max_norm_error, s.max_norm_error);
    min_eigenvalue = std::min(min_eigenvalue, s.min_cov_eigenvalue);
    skipped += s.skipped;
  }
};

InvariantLog g_invariants;

fusion::EstimatorOptions checked_options() {
  fusion::EstimatorOptions o;
  o.check_invariants = true;
  return o;
}

sim::Scenario default_scenario(std::uint64_t seed, double duration) {
  sim::ScenarioConfig cfg;
  cfg.duration_s = duration;
  cfg.seed = seed;
  return sim::simulate_scenario(kin::default_hand_chain(), cfg);
}

metrics::ErrorReport run_mode(const sim::Scenario& sc, const kin::KinematicChain& chain, fusion::FusionMode mode,
                              bool track = true) {
  const auto run = fusion::run_estimator(sc.merged, chain, mode, track ? checked_options() : fusion::EstimatorOptions{});
  if (track) g_invariants.add(run.diagnostics);
  std::vector<double> t;
  std::vector<kin::JointAngles> est, truth;
  t.reserve(sc.truth.samples.size());
  for (std::size_t i = 0; i < run.estimates.size(); ++i) {
    t.push_back(sc.truth.samples[i].t);
    truth.push_back(sc.truth.samples[i].angles);
    est.push_back(run.estimates[i].angles);
  }
  return metrics::joint_angle_error(t, est, truth, std::string(fusion::to_string(mode)));
}

double max_joint_rmse(const metrics::ErrorReport& r) {
  double m = 0.0;
  for (const auto& j : r.joints) m = std::max(m, j.rmse_deg);
  return m;
}

// Timed with invariant tracking off; the same runs are repeated with tracking
// for the invariant criterion.
Outcome ac1_accuracy() {
  const auto chain = kin::default_hand_chain();
  const auto t0 = Clock::now();
  int wins = 0;
  double worst_fused = 0.0, mean_f = 0.0, mean_i = 0.0, mean_c = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sc = default_scenario(seed, 120.0);
    const auto f = run_mode(sc, chain, fusion::FusionMode::Fused, false);
    const auto i = run_mode(sc, chain, fusion::FusionMode::ImuOnly, false);
    const auto c = run_mode(sc, chain, fusion::FusionMode::CamOnly, false);
    worst_fused = std::max(worst_fused, max_joint_rmse(f));
    mean_f += f.mean_rmse_deg / 20;
    mean_i += i.mean_rmse_deg / 20;
    mean_c += c.mean_rmse_deg / 20;
    if (max_joint_rmse(f) <= 4.0 && f.mean_rmse_deg < i.mean_rmse_deg && f.mean_rmse_deg < c.mean_rmse_deg) ++wins;
  }
  const double elapsed = seconds_since(t0);
  return {wins >= 18 && elapsed <= 60.0,
          fmt::format("{}/20 seeds, worst fused joint RMSE {:.3f} deg, mean RMSE fused {:.3f} / imu_only {:.3f} / "
                      "cam_only {:.3f} deg, {:.1f} s",
                      wins, worst_fused, mean_f, mean_i, mean_c, elapsed)};
}

Outcome ac2_drift() {
  const auto chain = kin::default_hand_chain();
  int ok = 0;
  double worst_fused = 0.0, min_imu = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sc = default_scenario(seed, 600.0);
    const double f = run_mode(sc, chain, fusion::FusionMode::Fused).mean_slope_deg_per_s;
    const double i = run_mode(sc, chain, fusion::FusionMode::ImuOnly).mean_slope_deg_per_s;
    worst_fused = std::max(worst_fused, std::abs(f));
    min_imu = std::min(min_imu, i);
    if (std::abs(f) <= metrics::kDriftFreeSlopeDegPerS && i > 5e-4) ++ok;
  }
  return {ok >= 18, fmt::format("{}/20 seeds, worst |fused slope| {:.2e} deg/s, smallest imu_only slope {:.2e} deg/s",
                                ok, worst_fused, min_imu)};
}

// Zero-latency EKF over the frames that have arrived by `until`.
fusion::Belief on_time_oracle(const std::vector<rot::UnitQuaternion>& imu,
                              const std::map<sim::Tick, std::pair<sim::Tick, rot::UnitQuaternion>>& frames,
                              sim::Tick until) {
  const fusion::NoiseConfig noise;
  fusion::Belief b = fusion::initial_belief(imu[0], {});
  for (sim::Tick t = 0; t <= until; ++t) {
    if (t > 0) b = fusion::predict(b, noise);
    const auto it = frames.find(t);
    if (it != frames.end() && it->second.first <= until) {
      fusion::update_joint(b, it->second.second, imu[static_cast<std::size_t>(t)], noise);
    } else {
      fusion::update_imu(b, imu[static_cast<std::size_t>(t)], noise);
    }
  }
  return b;
}

Outcome ac3_refit() {
  const fusion::NoiseConfig noise;
  double worst = 0.0;
  bool statuses = true, k0_exact = true;
  for (sim::Tick k : {0, 1, 5, 20, 64}) {
    std::mt19937_64 rng(3000 + static_cast<std::uint64_t>(k));
    for (int run = 0; run < 100; ++run) {
      const sim::Tick ticks = 260;
      std::vector<rot::UnitQuaternion> imu;
      std::map<sim::Tick, std::pair<sim::Tick, rot::UnitQuaternion>> frames;
      rot::UnitQuaternion truth = random_quaternion(rng);
      const auto bias = small_perturbation(rng, 0.05);
      for (sim::Tick t = 0; t < ticks; ++t) {
        truth = truth * small_perturbation(rng, 0.01);
        imu.push_back(truth * bias * small_perturbation(rng, 0.01));
        if (t % 7 == 3 && t + k < ticks) frames[t] = {t + k, truth * small_perturbation(rng, 0.02)};
      }
      fusion::LinkFilter f(noise, {}, fusion::kDefaultHistoryCapacity, true);
      for (sim::Tick t = 0; t < ticks; ++t) {
        f.advance(t, imu[static_cast<std::size_t>(t)]);
        for (const auto& [measured, fr] : frames) {
          if (fr.first != t) continue;
          fusion::Belief joint = f.history().back().prior;
          if (k == 0) fusion::update_joint(joint, fr.second, imu[static_cast<std::size_t>(t)], noise);
          const auto r = f.retrospective_refit(measured, fr.second);
          statuses = statuses && r.status == fusion::RefitStatus::Applied;
          if (k == 0) {
            k0_exact = k0_exact && f.live().state.vector() == joint.state.vector() && f.live().cov == joint.cov;
          }
        }
        if (k > 0 && (t % 50 == 49 || t == ticks - 1)) {
          const auto o = on_time_oracle(imu, frames, t);
          worst = std::max(worst, (f.live().state.vector() - o.state.vector()).cwiseAbs().maxCoeff());
        }
      }
      g_invariants.add(f.stats());
    }
  }
  return {worst < 1e-9 && statuses && k0_exact,
          fmt::format("max state gap {:.2e} over 400 runs (k = 1, 5, 20, 64), k = 0 {} joint update", worst,
                      k0_exact ? "is exactly the" : "differs from the")};
}

Outcome ac4_invariants() {
  const auto chain = kin::default_hand_chain();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sc = default_scenario(seed, 120.0);
    for (auto mode : {fusion::FusionMode::Fused, fusion::FusionMode::ImuOnly, fusion::FusionMode::CamOnly}) {
      run_mode(sc, chain, mode);
    }
  }
  return {g_invariants.max_norm_error <= 1e-12 && g_invariants.min_eigenvalue >= -1e-10 && g_invariants.skipped == 0,
          fmt::format("{} runs, max |norm - 1| {:.2e}, min covariance eigenvalue {:.2e}, {} skipped updates",
                      g_invariants.runs, g_invariants.max_norm_error, g_invariants.min_eigenvalue,
                      g_invariants.skipped)};
}

Eigen::Vector4d h_oracle(const fusion::StateVector& x) {
  const double w = x[0], a = x[1], b = x[2], c = x[3];
  const double u = 0.5 * x[4], v = 0.5 * x[5], s = 0.5 * x[6];
  return {w - a * u - b * v - c * s, w * u + a + b * s - c * v, w * v - a * s + b + c * u, w * s + a * v - b * u + c};
}

Outcome ac5_jacobian() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_state(rng, 0.3);
    const auto x = s.vector();
    Eigen::Matrix<double, 4, 7> fd;
    const double h = 1e-6;
    for (int c = 0; c < 7; ++c) {
      fusion::StateVector up = x, down = x;
      up[c] += h;
      down[c] -= h;
      fd.col(c) = (h_oracle(up) - h_oracle(down)) / (2 * h);
    }
    const double rel = (fusion::imu_measurement_jacobian(s) - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff();
    worst = std::max(worst, rel);
  }
  return {worst < 1e-5, fmt::format("max relative error {:.2e} over 1000 states", worst)};
}

double lock_distance(rot::EulerSequence seq, double beta) {
  if (rot::is_proper_euler(seq)) {
    return std::min(std::abs(rot::wrap_angle(beta)), std::abs(rot::wrap_angle(beta - kPi)));
  }
  return std::abs(std::abs(beta) - kPi / 2);
}

Outcome ac6_euler() {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (auto seq : rot::kAllEulerSequences) {
    int done = 0;
    while (done < 10000) {
      const Eigen::Matrix3d r = random_rotation(rng);
      const auto e = rot::matrix_to_euler(r, seq);
      if (lock_distance(seq, e.beta) <= 1e-3) continue;
      ++done;
      worst = std::max(worst, (rot::euler_to_matrix(e) - r).norm());
    }
  }
  // A trajectory passing exactly through the lock.
  bool lock_hit = true, continuous = true;
  double lock_worst = 0.0;
  for (auto seq : rot::kAllEulerSequences) {
    const double lock = rot::is_proper_euler(seq) ? 0.0 : kPi / 2;
    rot::EulerAngles prev{0.2, lock - 0.1, -0.4, seq};
    bool hit = false;
    for (int i = 0; i <= 200; ++i) {
      const rot::EulerAngles truth{0.2 + 0.002 * i, lock + (i - 100) * 1e-3, -0.4 + 0.003 * i, seq};
      const Eigen::Matrix3d r = rot::euler_to_matrix(truth);
      const auto e = rot::matrix_to_euler_continuous(r, prev, seq);
      lock_worst = std::max(lock_worst, (rot::euler_to_matrix(e) - r).norm());
      if (i == 100) {
        hit = e.alpha == prev.alpha;
      } else if (std::abs(i - 100) > 1) {
        const double gap = std::max({std::abs(rot::wrap_angle(e.alpha - truth.alpha)),
                                     std::abs(rot::wrap_angle(e.beta - truth.beta)),
                                     std::abs(rot::wrap_angle(e.gamma - truth.gamma))});
        continuous = continuous && gap < 1e-6;
      }
      prev = e;
    }
    lock_hit = lock_hit && hit;
  }
  return {worst < 1e-9 && lock_worst < 1e-9 && lock_hit && continuous,
          fmt::format("round-trip max error {:.2e} (120000 rotations), lock branch {}, lock-pass error {:.2e}, {}",
                      worst, lock_hit ? "exercised" : "missed", lock_worst,
                      continuous ? "continuous" : "discontinuous")};
}

Outcome ac7_projection() {
  std::mt19937_64 rng(7);
  int beaten = 0;
  double worst_recovery = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix3d observed = random_rotation(rng);
    const Eigen::Matrix3d constrained = random_rotation(rng);
    const auto axis = static_cast<rot::Axis>(i % 3);
    const auto p = kin::project_kinematic_constraint(observed, constrained, axis);
    const double cost = kin::projection_cost(observed, constrained, axis, p.removed_angle);
    double sweep = std::numeric_limits<double>::infinity();
    for (int s = -18000; s < 18000; ++s) {
      sweep = std::min(sweep, kin::projection_cost(observed, constrained, axis, s * 0.01 * kDeg));
    }
    if (cost > sweep + 1e-12) ++beaten;

    const double injected = uniform(rng, -kPi + 1e-3, kPi - 1e-3);
    const auto q = kin::project_kinematic_constraint(constrained * axis_matrix(static_cast<int>(axis), injected),
                                                     constrained, axis);
    worst_recovery = std::max(worst_recovery, std::abs(rot::wrap_angle(q.removed_angle - injected)));
  }
  return {beaten == 0 && worst_recovery < 1e-9,
          fmt::format("sweep beat the closed form on {}/1000 instances, injected-angle error {:.2e} rad", beaten,
                      worst_recovery)};
}

rot::UnitQuaternion rz(double rad) { return rot::UnitQuaternion::about(rot::Axis::Z, rad); }

// Single-axis mean by a 0.01 degree grid refined with golden-section search.
double grid_mean(const std::vector<rot::UnitQuaternion>& set) {
  auto cost = [&](double a) { return rot::geodesic_cost(rz(a), set); };
  double best = 0.0, best_cost = std::numeric_limits<double>::infinity();
  for (int s = -18000; s < 18000; ++s) {
    const double a = s * 0.01 * kDeg;
    if (const double c = cost(a); c < best_cost) {
      best_cost = c;
      best = a;
    }
  }
  double lo = best - 0.01 * kDeg, hi = best + 0.01 * kDeg;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 100; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    (cost(a) < cost(b) ? hi : lo) = (cost(a) < cost(b) ? b : a);
  }
  return 0.5 * (lo + hi);
}

Outcome ac8_statistics() {
  std::mt19937_64 rng(8);
  double worst_mean = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<rot::UnitQuaternion> set;
    const double center = uniform(rng, -2.5, 2.5);
    for (int i = 0; i < 2 + trial % 5; ++i) set.push_back(rz(center + uniform(rng, -0.7, 0.7)));
    const auto m = rot::quat_mean(set);
    worst_mean = std::max(worst_mean, rot::quat_geodesic_distance(m.mean, rz(grid_mean(set))));
  }

  const double d = kDeg;
  const double v0 = rot::angular_variance(std::vector{rz(7 * d), rz(7 * d), rz(7 * d)}, rz(7 * d)).variance_deg2;
  const double v1 = rot::angular_variance(std::vector{rz(0), rz(10 * d)}, rz(5 * d)).variance_deg2;
  const double v2 = rot::angular_variance(std::vector{rz(0), rz(10 * d), rz(20 * d)}, rz(10 * d)).variance_deg2;
  const bool examples = std::abs(v0) < 1e-12 && std::abs(v1) < 1e-10 && std::abs(v2 - 200.0 / 9.0) < 1e-10;

  // Four co-located IMUs held at one pose; noise set for 8 deg^2 of angular
  // variance (half-normal: sigma^2 (1 - 2/pi)).
  const double injected = 8.0;
  sim::ImuModel imu;
  imu.orientation_noise_std = std::sqrt(injected / (1.0 - 2.0 / kPi)) * kDeg;
  std::map<int, std::vector<rot::UnitQuaternion>> sets;
  for (int pose = 1; pose <= 6; ++pose) {
    const auto q = rot::UnitQuaternion::about(rot::Axis::X, kPi / 2) * rz(pose * 60 * kDeg);
    sim::Trajectory truth;
    for (int k = 0; k < 500; ++k) truth.samples.push_back({k, k / 200.0, {}, std::vector(4, q)});
    for (const auto& e : sim::simulate_imu_stream(truth, imu, 80 + pose).events) sets[pose].push_back(e.payload);
  }
  double worst_rel = 0.0;
  for (const auto& row : metrics::uniformity_report(sets)) {
    worst_rel = std::max(worst_rel, std::abs(row.variance_deg2 - injected) / injected);
  }
  return {worst_mean < 1e-6 && examples && worst_rel < 0.2,
          fmt::format("mean vs grid oracle {:.2e} rad, hand examples {}, uniformity off by at most {:.1f}% of {} deg^2",
                      worst_mean, examples ? "exact" : "wrong", 100 * worst_rel, injected)};
}

Outcome ac9_drift_fit() {
  const double slope = 33e-4;  // deg/s
  const double rate = 10.0;
  const int n = static_cast<int>(2 * 3600 * rate);
  sim::Trajectory truth;
  truth.rate_hz = rate;
  std::vector<double> t;
  const auto pose = rot::UnitQuaternion::about(rot::Axis::Y, 0.4) * rot::UnitQuaternion::about(rot::Axis::X, -0.2);
  for (int k = 0; k < n; ++k) {
    t.push_back(k / rate);
    truth.samples.push_back({k, t.back(), {}, std::vector(4, rz(slope * kDeg * t.back()) * pose)});
  }
  sim::ImuModel imu;
  imu.rate_hz = rate;
  imu.orientation_noise_std = 0.1 * kDeg;
  const auto stream = sim::simulate_imu_stream(truth, imu, 9);
  std::vector<std::vector<rot::UnitQuaternion>> per_sensor(4);
  for (const auto& e : stream.events) per_sensor[static_cast<std::size_t>(e.sensor_id)].push_back(e.payload);
  const auto report = metrics::orientation_drift(t, per_sensor);
  const double got = report.axes[2].slope_deg_per_s;
  const double rel = std::abs(got - slope) / slope;
  return {rel < 0.01, fmt::format("yaw slope {:.4e} deg/s vs injected {:.1e} ({:.3f}% off)", got, slope, 100 * rel)};
}

Outcome ac10_throughput() {
  sim::ScenarioConfig cfg;
  cfg.duration_s = 60.0;
  cfg.seed = 10;
  cfg.camera.rate_hz = 30.0;
  cfg.camera.latency_ticks = 64;
  const auto chain = kin::default_hand_chain();
  const auto sc = sim::simulate_scenario(chain, cfg);
  const auto t0 = Clock::now();
  const auto run = fusion::run_estimator(sc.merged, chain, fusion::FusionMode::Fused);
  const double elapsed = seconds_since(t0);
  const double rate = static_cast<double>(run.estimates.size()) / elapsed;
  return {rate >= 200.0 && run.diagnostics.refits > 0,
          fmt::format("{:.0f} IMU ticks/s ({} refits, {} ticks in {:.2f} s)", rate, run.diagnostics.refits,
                      run.estimates.size(), elapsed)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(entry.path(), dir).generic_string()] = ss.str();
  }
  return out;
}

Outcome ac11_determinism() {
  const fs::path dir = fs::temp_directory_path() / "handcept_acceptance_determinism";
  const std::string exe = HANDCEPT_EXE;
  const std::string d = dir.string();
  const std::vector<std::string> commands = {
      fmt::format("\"{}\" simulate --seed 11 --duration 5 --out \"{}/sim\"", exe, d),
      fmt::format("\"{}\" fuse --imu \"{}/sim/imu.csv\" --cam \"{}/sim/cam.csv\" --truth \"{}/sim/truth.csv\" --out "
                  "\"{}/fused\"",
                  exe, d, d, d, d),
      fmt::format("\"{}\" fuse --mode imu_only --stream \"{}/sim/stream.hcp\" --out \"{}/imu_only\"", exe, d, d),
      fmt::format("\"{}\" fuse --mode cam_only --stream \"{}/sim/stream.hcp\" --out \"{}/cam_only\"", exe, d, d),
      fmt::format("\"{}\" drift \"{}/sim/imu.csv\" --out \"{}/drift\"", exe, d, d),
      fmt::format("\"{}\" drift --raw \"{}/sim/imu.csv\" --out \"{}/drift_raw\"", exe, d, d),
      fmt::format("\"{}\" uniformity \"{}/sim/imu.csv\" \"{}/sim/imu.csv\" --out \"{}/uniformity\"", exe, d, d, d),
      fmt::format("\"{}\" compare --truth \"{}/sim/truth.csv\" \"{}/fused/est.csv\" \"{}/imu_only/est.csv\" --out "
                  "\"{}/compare\"",
                  exe, d, d, d, d),
      fmt::format("\"{}\" euler --matrix \"0 -1 0 1 0 0 0 0 1\" --seq ZXZ > \"{}/euler.txt\"", exe, d),
  };
  auto run_all = [&]() -> std::optional<std::map<std::string, std::string>> {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& c : commands) {
      if (std::system(c.c_str()) != 0) return std::nullopt;
    }
    return snapshot(dir);
  };
  const auto first = run_all();
  const auto second = run_all();
  fs::remove_all(dir);
  if (!first || !second) return {false, "a command failed"};
  const bool same = *first == *second;
  return {same && first->size() >= 15,
          fmt::format("{} output files from {} commands {}", first->size(), commands.size(),
                      same ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1  fusion accuracy", ac1_accuracy},     {"AC2  drift-freeness", ac2_drift},
      {"AC3  refit correctness", ac3_refit},      {"AC4  EKF invariants", ac4_invariants},
      {"AC5  jacobian", ac5_jacobian},            {"AC6  euler round trip", ac6_euler},
      {"AC7  constraint projection", ac7_projection}, {"AC8  quaternion statistics", ac8_statistics},
      {"AC9  drift fitting", ac9_drift_fit},      {"AC10 throughput", ac10_throughput},
      {"AC11 determinism", ac11_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%-28s %s  %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
