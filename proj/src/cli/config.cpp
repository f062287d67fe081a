#include "handcept/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "handcept/rot/euler.hpp"

namespace handcept::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// "<number> <unit>" with optional whitespace between.
std::pair<double, std::string_view> split_quantity(std::string_view text) {
  text = trim(text);
  const char* begin = text.data();
  const char* end = begin + text.size();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr == begin) {
    throw ValidationError("expected a number in '" + std::string(text) + "'");
  }
  return {v, trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)))};
}

Eigen::Matrix3d zyx_rotation(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) {
    throw ValidationError("expected three angles 'a deg, b deg, c deg', got '" + std::string(text) + "'");
  }
  return rot::euler_to_matrix(
      {parse_angle(parts[0]), parse_angle(parts[1]), parse_angle(parts[2]), rot::EulerSequence::ZYX});
}

Eigen::Vector3d vector3(std::string_view text) {
  const auto parts = split_whitespace(text);
  if (parts.size() != 3) {
    throw ValidationError("expected three numbers, got '" + std::string(text) + "'");
  }
  return {parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])};
}

[[noreturn]] void unknown_key(const ConfigSection& s, const std::string& key) {
  throw ValidationError("line " + std::to_string(s.line) + ": unknown key '" + key + "' in section [" + s.name +
                        "]");
}

}  // namespace

std::vector<ConfigSection> parse_config_text(std::string_view text) {
  std::vector<ConfigSection> sections{{"", 0, {}}};
  int line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ValidationError("line " + std::to_string(line_no) + ": malformed section header");
      }
      sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!sections.back().values.emplace(key, value).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return sections;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw RuntimeError("cannot read '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(std::string_view text) {
  const auto [v, rest] = split_quantity(text);
  if (!rest.empty() || !std::isfinite(v)) {
    throw ValidationError("expected a plain number, got '" + std::string(text) + "'");
  }
  return v;
}

std::int64_t parse_integer(std::string_view text) {
  text = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ValidationError("expected true or false, got '" + std::string(text) + "'");
}

double parse_angle(std::string_view text, std::string_view unit) {
  const auto [v, suffix] = split_quantity(text);
  if (!std::isfinite(v)) {
    throw ValidationError("non-finite angle '" + std::string(text) + "'");
  }
  if (suffix.starts_with("rad")) {
    throw ValidationError("radian values are not accepted, write '" + std::string(unit) + "' instead: '" +
                          std::string(text) + "'");
  }
  if (suffix != unit) {
    throw ValidationError("angle '" + std::string(trim(text)) + "' needs the unit suffix '" + std::string(unit) +
                          "'");
  }
  return v * std::numbers::pi / 180.0;
}

sim::CameraModel RunConfig::camera_default() {
  sim::CameraModel m = sim::default_camera_model();
  m.rate_hz = 40.0;  // divides the 200 Hz IMU clock
  return m;
}

void apply_config(RunConfig& c, const std::vector<ConfigSection>& sections, const std::filesystem::path& base_dir) {
  for (const ConfigSection& s : sections) {
    for (const auto& [key, value] : s.values) {
      if (s.name == "" || s.name == "run") {
        if (key == "chain") {
          const std::filesystem::path p(value);
          c.chain_path = p.is_absolute() ? p : base_dir / p;
        } else if (key == "duration_s") {
          c.duration_s = parse_number(value);
        } else if (key == "seed") {
          c.seed = static_cast<std::uint64_t>(parse_integer(value));
        } else if (key == "mode") {
          try {
            c.mode = fusion::parse_mode(value);
          } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
          }
        } else if (key == "out") {
          c.out_dir = value;
        } else {
          unknown_key(s, key);
        }
      } else if (s.name == "imu") {
        if (key == "rate_hz") c.imu.rate_hz = parse_number(value);
        else if (key == "noise") c.imu.orientation_noise_std = parse_angle(value);
        else if (key == "bias_walk") c.imu.bias_walk_std = parse_angle(value, "deg/sqrt(s)");
        else if (key == "bias_spread") c.imu.initial_bias_spread = parse_angle(value);
        else if (key == "bias_drift") c.imu.bias_drift_rate = parse_angle(value, "deg/s");
        else if (key == "initial_bias") {
          const auto parts = split(value, ',');
          if (parts.size() != 3) throw ValidationError("initial_bias needs three angles");
          c.imu.initial_bias = {parse_angle(parts[0]), parse_angle(parts[1]), parse_angle(parts[2])};
        } else unknown_key(s, key);
      } else if (s.name == "camera") {
        if (key == "rate_hz") c.camera.rate_hz = parse_number(value);
        else if (key == "noise") c.camera.orientation_noise_std = parse_angle(value);
        else if (key == "latency_ticks") c.camera.latency_ticks = parse_integer(value);
        else if (key == "dropout") c.camera.dropout_prob = parse_number(value);
        else unknown_key(s, key);
      } else if (s.name == "motion") {
        if (key == "terms") c.motion.terms_per_joint = static_cast<int>(parse_integer(value));
        else if (key == "min_frequency_hz") c.motion.min_frequency_hz = parse_number(value);
        else if (key == "max_frequency_hz") c.motion.max_frequency_hz = parse_number(value);
        else if (key == "range_fraction") c.motion.range_fraction = parse_number(value);
        else unknown_key(s, key);
      } else if (s.name == "filter") {
        auto& o = c.estimator;
        // Variances of quaternion components, applied as multiples of identity.
        if (key == "q_q") o.noise.q_q = parse_number(value) * Eigen::Matrix4d::Identity();
        else if (key == "q_b") o.noise.q_b = parse_number(value) * Eigen::Matrix3d::Identity();
        else if (key == "r_imu") o.noise.r_imu = parse_number(value) * Eigen::Matrix4d::Identity();
        else if (key == "r_cam") o.noise.r_cam = parse_number(value) * Eigen::Matrix4d::Identity();
        else if (key == "p0_q") o.init.p_q = parse_number(value) * Eigen::Matrix4d::Identity();
        else if (key == "p0_b") o.init.p_b = parse_number(value) * Eigen::Matrix3d::Identity();
        else if (key == "buffer") o.buffer_capacity = static_cast<std::size_t>(std::max<std::int64_t>(0, parse_integer(value)));
        else unknown_key(s, key);
      } else {
        throw ValidationError("line " + std::to_string(s.line) + ": unknown section [" + s.name + "]");
      }
    }
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig c;
  apply_config(c, parse_config_text(read_text_file(path)), path.parent_path());
  return c;
}

void validate_run_config(const RunConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
  };
  require(c.duration_s > 0.0 && std::isfinite(c.duration_s), "duration must be positive");
  require(c.imu.rate_hz > 0.0 && std::isfinite(c.imu.rate_hz), "IMU rate must be positive");
  require(c.camera.rate_hz > 0.0 && std::isfinite(c.camera.rate_hz), "camera rate must be positive");
  const double ratio = c.imu.rate_hz / c.camera.rate_hz;
  if (ratio < 1.0 || std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ValidationError(fmt::format("camera rate {} Hz does not divide the IMU rate {} Hz", c.camera.rate_hz, c.imu.rate_hz));
  }
  require(c.camera.latency_ticks >= 0, "latency ticks must be nonnegative");
  require(c.camera.dropout_prob >= 0.0 && c.camera.dropout_prob < 1.0, "camera dropout must be in [0, 1)");
  require(c.imu.orientation_noise_std >= 0.0 && c.camera.orientation_noise_std >= 0.0, "noise must be nonnegative");
  require(c.imu.bias_walk_std >= 0.0 && c.imu.initial_bias_spread >= 0.0, "bias spread must be nonnegative");
  require(c.motion.terms_per_joint >= 0, "motion terms must be nonnegative");
  require(c.motion.range_fraction >= 0.0 && c.motion.range_fraction <= 1.0, "range_fraction must be in [0, 1]");
  require(c.estimator.buffer_capacity > 0, "filter buffer must be positive");
  try {
    c.estimator.noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

kin::KinematicChain parse_chain_text(std::string_view text) {
  std::vector<kin::JointSpec> joints;
  for (const ConfigSection& s : parse_config_text(text)) {
    if (s.name.empty()) {
      if (!s.values.empty()) throw ValidationError("chain keys must follow a [joint] header");
      continue;
    }
    if (s.name != "joint") {
      throw ValidationError("line " + std::to_string(s.line) + ": unknown section [" + s.name + "]");
    }
    kin::JointSpec j;
    Eigen::Matrix3d offset_rotation = Eigen::Matrix3d::Identity();
    for (const auto& [key, value] : s.values) {
      if (key == "name") j.name = value;
      else if (key == "parent") {
        if (value == "base") {
          j.parent = -1;
        } else {
          const auto it = std::find_if(joints.begin(), joints.end(), [&](const kin::JointSpec& p) { return p.name == value; });
          if (it == joints.end()) {
            throw ValidationError("line " + std::to_string(s.line) + ": parent '" + value + "' is not defined earlier");
          }
          j.parent = static_cast<int>(it - joints.begin());
        }
      } else if (key == "axis") {
        if (value.size() != 1) throw ValidationError("axis must be x, y or z");
        try {
          j.axis = rot::parse_axis(value[0]);
        } catch (const std::invalid_argument& e) {
          throw ValidationError(e.what());
        }
      } else if (key == "lower") j.limits.lower = parse_angle(value);
      else if (key == "upper") j.limits.upper = parse_angle(value);
      else if (key == "offset") j.link_offset.translation = vector3(value);
      else if (key == "offset_rotation_zyx") offset_rotation = zyx_rotation(value);
      else if (key == "pre_rotation_zyx") j.fixed_pre_rotation = zyx_rotation(value);
      else if (key == "tracked") j.tracked = parse_bool(value);
      else if (key == "finger") j.finger = static_cast<int>(parse_integer(value));
      else unknown_key(s, key);
    }
    if (j.name.empty()) {
      throw ValidationError("line " + std::to_string(s.line) + ": joint needs a name");
    }
    j.link_offset.rotation = offset_rotation;
    joints.push_back(std::move(j));
  }
  if (joints.empty()) {
    throw ValidationError("chain has no joints");
  }
  try {
    kin::KinematicChain chain(std::move(joints));
    (void)chain.segments();
    return chain;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

kin::KinematicChain load_chain(const RunConfig& config) {
  if (config.chain_path.empty()) {
    return kin::default_hand_chain();
  }
  return parse_chain_text(read_text_file(config.chain_path));
}

}  // namespace handcept::cli
