// handcept: simulate sensor streams, run the visual-inertial estimator and
// produce drift, uniformity and accuracy reports.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "handcept/cli/commands.hpp"

namespace {

using namespace handcept;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> imu_rate;
  std::optional<double> cam_rate;
  std::optional<std::int64_t> latency;
  std::optional<std::string> mode;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration file");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--duration", o.duration, "Duration in seconds");
  cmd->add_option("--imu-rate", o.imu_rate, "IMU rate in Hz");
  cmd->add_option("--cam-rate", o.cam_rate, "Camera rate in Hz");
  cmd->add_option("--latency-ticks", o.latency, "Camera latency in IMU ticks");
  cmd->add_option("--mode", o.mode, "imu_only, cam_only or fused");
  cmd->add_option("--out", o.out, "Output directory");
}

cli::RunConfig resolve(const Overrides& o) {
  cli::RunConfig c = o.config.empty() ? cli::RunConfig{} : cli::load_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.duration) c.duration_s = *o.duration;
  if (o.imu_rate) c.imu.rate_hz = *o.imu_rate;
  if (o.cam_rate) c.camera.rate_hz = *o.cam_rate;
  if (o.latency) c.camera.latency_ticks = *o.latency;
  if (o.mode) {
    try {
      c.mode = fusion::parse_mode(*o.mode);
    } catch (const std::invalid_argument& e) {
      throw cli::ValidationError(e.what());
    }
  }
  if (o.out) c.out_dir = *o.out;
  return c;
}

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("handcept");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("HANDCEPT_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

int fail(std::string_view kind, std::string_view message, int code) {
  std::string line(message);
  for (char& ch : line) {
    if (ch == '\n') ch = ' ';
  }
  std::cerr << "error: " << kind << ": " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Visual-inertial joint angle estimation toolkit"};
  app.require_subcommand(1);

  Overrides o;
  auto* simulate = app.add_subcommand("simulate", "Write truth.csv, imu.csv, cam.csv and stream.hcp");
  add_common(simulate, o);

  cli::FuseInputs fuse_in;
  auto* fuse = app.add_subcommand("fuse", "Run the estimator, write est.csv and diagnostics.csv");
  add_common(fuse, o);
  fuse->add_option("--imu", fuse_in.imu, "IMU csv");
  fuse->add_option("--cam", fuse_in.cam, "Camera csv");
  fuse->add_option("--stream", fuse_in.stream, "Packet stream instead of csv inputs");
  fuse->add_option("--truth", fuse_in.truth, "Truth csv for error columns");

  std::string drift_in;
  bool raw = false;
  auto* drift = app.add_subcommand("drift", "Fit first-order orientation drift, write drift.csv");
  add_common(drift, o);
  drift->add_option("input", drift_in, "IMU csv")->required();
  drift->add_flag("--raw", raw, "Fit raw readings instead of the filtered stream");

  std::vector<std::string> poses;
  auto* uniformity = app.add_subcommand("uniformity", "Angular variance per pose, write var.csv");
  add_common(uniformity, o);
  uniformity->add_option("inputs", poses, "One IMU csv per pose")->required();

  std::string matrix, sequence = "ZYX", prev;
  auto* euler = app.add_subcommand("euler", "Euler angles (deg) of a rotation matrix");
  euler->add_option("--matrix", matrix, "Nine row-major entries")->required();
  euler->add_option("--seq", sequence, "Axis sequence such as ZYX or ZXZ");
  euler->add_option("--prev", prev, "Previous angles 'a deg, b deg, c deg'");

  std::string truth;
  std::vector<std::string> estimates;
  auto* compare = app.add_subcommand("compare", "Error statistics against truth, write report.csv");
  add_common(compare, o);
  compare->add_option("--truth", truth, "Truth csv")->required();
  compare->add_option("estimates", estimates, "est.csv files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("validation", e.what(), 1);
  }

  try {
    if (*euler) {
      const rot::EulerAngles a = cli::cmd_euler(matrix, sequence, prev);
      constexpr double kDeg = 180.0 / 3.14159265358979323846;
      // Print tiny values as 0 so that -0.000000000 never appears.
      auto deg = [&](double v) { return std::abs(v * kDeg) < 5e-10 ? 0.0 : v * kDeg; };
      std::cout << fmt::format("{:.9f},{:.9f},{:.9f}\n", deg(a.alpha), deg(a.beta), deg(a.gamma));
      return 0;
    }
    const cli::RunConfig config = resolve(o);
    if (*simulate) {
      cli::cmd_simulate(config);
    } else if (*fuse) {
      cli::cmd_fuse(config, fuse_in);
    } else if (*drift) {
      cli::cmd_drift(config, drift_in, raw);
    } else if (*uniformity) {
      cli::cmd_uniformity(config, {poses.begin(), poses.end()});
    } else if (*compare) {
      cli::cmd_compare(config, truth, {estimates.begin(), estimates.end()});
    }
  } catch (const cli::ValidationError& e) {
    return fail("validation", e.what(), 1);
  } catch (const std::invalid_argument& e) {
    return fail("validation", e.what(), 1);
  } catch (const std::out_of_range& e) {
    return fail("validation", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 2);
  }
  return 0;
}
