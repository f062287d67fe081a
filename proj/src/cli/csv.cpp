#include "handcept/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "handcept/cli/config.hpp"

namespace handcept::cli {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    std::string_view cell = line.substr(start, pos - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

std::vector<std::size_t> joint_columns(const CsvTable& t) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; t.has_column("joint_" + std::to_string(j)); ++j) {
    cols.push_back(t.column("joint_" + std::to_string(j)));
  }
  return cols;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw ValidationError("missing CSV column '" + std::string(name) + "'");
}

bool CsvTable::has_column(std::string_view name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable parse_csv(std::string_view text, std::string_view source) {
  CsvTable t;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    auto cells = split_row(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ValidationError(fmt::format("{}:{}: expected {} fields, found {}", source, line_no, t.header.size(),
                                        cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) {
    throw ValidationError(std::string(source) + ": missing header row");
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path), path.string()); }

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RuntimeError("cannot write '" + path.string() + "'");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw RuntimeError("write to '" + path.string() + "' failed");
  }
}

double cell_number(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError(fmt::format("row {} column '{}': '{}' is not a number", row + 1, t.header[col], s));
  }
  return v;
}

sim::Tick cell_tick(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows[row][col];
  sim::Tick v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw ValidationError(fmt::format("row {} column '{}': '{}' is not a tick", row + 1, t.header[col], s));
  }
  return v;
}

std::string format_events(std::span<const sim::MeasurementEvent> events) {
  std::string out = "tick_measured,tick_arrives,sensor_id,qw,qx,qy,qz\n";
  for (const auto& e : events) {
    const auto& q = e.payload;
    fmt::format_to(std::back_inserter(out), "{},{},{},{:.12f},{:.12f},{:.12f},{:.12f}\n", e.measured_at, e.arrives_at,
                   e.sensor_id, q.w(), q.x(), q.y(), q.z());
  }
  return out;
}

std::vector<sim::MeasurementEvent> read_events(const std::filesystem::path& path, sim::SensorKind kind) {
  const CsvTable t = read_csv(path);
  const std::size_t cm = t.column("tick_measured"), ca = t.column("tick_arrives"), cs = t.column("sensor_id");
  const std::size_t cw = t.column("qw"), cx = t.column("qx"), cy = t.column("qy"), cz = t.column("qz");
  std::vector<sim::MeasurementEvent> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    sim::MeasurementEvent e;
    e.kind = kind;
    e.measured_at = cell_tick(t, r, cm);
    e.arrives_at = cell_tick(t, r, ca);
    e.sensor_id = static_cast<int>(cell_tick(t, r, cs));
    if (e.arrives_at < e.measured_at) {
      throw ValidationError(fmt::format("{}: row {} arrives before it was measured", path.string(), r + 1));
    }
    try {
      e.payload = rot::UnitQuaternion(cell_number(t, r, cw), cell_number(t, r, cx), cell_number(t, r, cy),
                                      cell_number(t, r, cz));
    } catch (const std::invalid_argument&) {
      throw ValidationError(fmt::format("{}: row {} has a zero quaternion", path.string(), r + 1));
    }
    out.push_back(e);
  }
  return out;
}

std::string format_truth(const sim::Trajectory& truth) {
  std::string out = "tick,t_s";
  const std::size_t joints = truth.samples.empty() ? 0 : truth.samples.front().angles.size();
  for (std::size_t j = 0; j < joints; ++j) fmt::format_to(std::back_inserter(out), ",joint_{}", j);
  for (std::size_t i = 0; i < truth.link_count(); ++i) {
    fmt::format_to(std::back_inserter(out), ",link_{0}_qw,link_{0}_qx,link_{0}_qy,link_{0}_qz", i);
  }
  out += '\n';
  for (const auto& s : truth.samples) {
    fmt::format_to(std::back_inserter(out), "{},{:.6f}", s.tick, s.t);
    for (double a : s.angles) fmt::format_to(std::back_inserter(out), ",{:.9f}", a * kDeg);
    for (const auto& q : s.links) {
      fmt::format_to(std::back_inserter(out), ",{:.12f},{:.12f},{:.12f},{:.12f}", q.w(), q.x(), q.y(), q.z());
    }
    out += '\n';
  }
  return out;
}

TruthTable read_truth(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ct = t.column("tick"), cs = t.column("t_s");
  const auto cols = joint_columns(t);
  TruthTable out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.ticks.push_back(cell_tick(t, r, ct));
    out.t_s.push_back(cell_number(t, r, cs));
    kin::JointAngles a;
    for (std::size_t c : cols) a.push_back(cell_number(t, r, c) / kDeg);
    out.angles.push_back(std::move(a));
  }
  return out;
}

EstimateTable read_estimates(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ct = t.column("tick"), cm = t.column("mode");
  const auto cols = joint_columns(t);
  EstimateTable out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (r == 0) {
      out.mode = t.rows[r][cm];
    }
    out.ticks.push_back(cell_tick(t, r, ct));
    kin::JointAngles a;
    for (std::size_t c : cols) a.push_back(cell_number(t, r, c) / kDeg);
    out.angles.push_back(std::move(a));
  }
  return out;
}

}  // namespace handcept::cli
