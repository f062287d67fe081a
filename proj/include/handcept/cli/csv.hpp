#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "handcept/kin/chain.hpp"
#include "handcept/sim/sensors.hpp"
#include "handcept/sim/trajectory.hpp"

namespace handcept::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ValidationError when the column is absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

// Header row mandatory; every row must have the header's width.
CsvTable parse_csv(std::string_view text, std::string_view source);
CsvTable read_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);

double cell_number(const CsvTable& t, std::size_t row, std::size_t col);
sim::Tick cell_tick(const CsvTable& t, std::size_t row, std::size_t col);

// tick_measured, tick_arrives, sensor_id, qw, qx, qy, qz
std::string format_events(std::span<const sim::MeasurementEvent> events);
std::vector<sim::MeasurementEvent> read_events(const std::filesystem::path& path, sim::SensorKind kind);

// tick, t_s, joint_0.. (deg), link_i_qw..qz
std::string format_truth(const sim::Trajectory& truth);

struct TruthTable {
  std::vector<sim::Tick> ticks;
  std::vector<double> t_s;
  std::vector<kin::JointAngles> angles;  // rad
};

TruthTable read_truth(const std::filesystem::path& path);

// tick, mode, joint_0.. (deg)
struct EstimateTable {
  std::string mode;
  std::vector<sim::Tick> ticks;
  std::vector<kin::JointAngles> angles;  // rad
};

EstimateTable read_estimates(const std::filesystem::path& path);

}  // namespace handcept::cli
