#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "handcept/cli/config.hpp"
#include "handcept/fusion/estimator.hpp"
#include "handcept/rot/euler.hpp"

namespace handcept::cli {

// truth.csv, imu.csv, cam.csv and stream.hcp (the merged stream as bus frames).
void cmd_simulate(const RunConfig& config);

struct FuseInputs {
  std::filesystem::path imu;
  std::filesystem::path cam;
  std::filesystem::path stream;  // alternative to imu + cam
  std::filesystem::path truth;   // optional, adds err_* columns
};

// est.csv and diagnostics.csv.
fusion::FusionDiagnostics cmd_fuse(const RunConfig& config, const FuseInputs& inputs);

// drift.csv: per-axis fit of roll/pitch/yaw averaged over sensors. The
// orientations are first passed through the inertial-only filter unless
// `raw` is set.
void cmd_drift(const RunConfig& config, const std::filesystem::path& imu_csv, bool raw);

// var.csv: one imu.csv per pose, numbered from 1 in argument order.
void cmd_uniformity(const RunConfig& config, const std::vector<std::filesystem::path>& inputs);

// `matrix` is nine row-major numbers; `prev` is "a deg, b deg, c deg" or empty.
rot::EulerAngles cmd_euler(std::string_view matrix, std::string_view sequence, std::string_view prev);

// report.csv: per-joint and mean error of each estimate file against truth.
void cmd_compare(const RunConfig& config, const std::filesystem::path& truth,
                 const std::vector<std::filesystem::path>& estimates);

}  // namespace handcept::cli
