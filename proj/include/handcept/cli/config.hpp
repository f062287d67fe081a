#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "handcept/fusion/estimator.hpp"
#include "handcept/kin/chain.hpp"
#include "handcept/sim/scenario.hpp"

namespace handcept::cli {

// Bad input: flags, config values, file contents. Exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Environment failures such as unreadable or unwritable files. Exit code 2.
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// `key = value` lines grouped under `[section]` headers. Keys before the
/// first header belong to the "" section. `#` starts a comment. Repeated
/// sections (such as [joint]) are kept in file order.
struct ConfigSection {
  std::string name;
  int line = 0;
  std::map<std::string, std::string> values;
};

std::vector<ConfigSection> parse_config_text(std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// Numeric value carrying a unit suffix, e.g. "0.5 deg" or "4e-3 deg/s".
/// Returns the value in radians (per the suffix's time unit). A missing
/// suffix or a radian suffix is rejected.
double parse_angle(std::string_view text, std::string_view unit = "deg");
double parse_number(std::string_view text);
std::int64_t parse_integer(std::string_view text);
bool parse_bool(std::string_view text);

struct RunConfig {
  std::filesystem::path chain_path;  // empty: built-in two-finger hand
  double duration_s = 10.0;
  std::uint64_t seed = 1;
  fusion::FusionMode mode = fusion::FusionMode::Fused;
  std::filesystem::path out_dir = ".";
  sim::ImuModel imu = sim::default_imu_model();
  sim::CameraModel camera = camera_default();
  sim::RandomMotionOptions motion;
  fusion::EstimatorOptions estimator;

  static sim::CameraModel camera_default();
};

// Applies a config file on top of the defaults. Relative chain paths resolve
// against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
void apply_config(RunConfig& config, const std::vector<ConfigSection>& sections,
                  const std::filesystem::path& base_dir);

// Throws ValidationError for out-of-range values, including a camera rate
// that does not divide the IMU rate.
void validate_run_config(const RunConfig& config);

/// Chain description: one [joint] section per joint, in chain order.
///   name, parent (joint name or "base"), axis (x|y|z), lower/upper (deg),
///   offset (x y z, m), offset_rotation_zyx and pre_rotation_zyx
///   ("a deg, b deg, c deg"), tracked (true|false), finger.
kin::KinematicChain parse_chain_text(std::string_view text);
kin::KinematicChain load_chain(const RunConfig& config);

}  // namespace handcept::cli
