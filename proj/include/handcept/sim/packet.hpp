#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "handcept/sim/sensors.hpp"

namespace handcept::sim {

/// Fixed 32-byte bus frame, little-endian:
///
///   off  size  field
///   0    2     sync 0xA5 0x5A
///   2    1     kind (0 imu, 1 camera)
///   3    1     bus_channel (multiplexer port) = sensor_id / 8
///   4    1     imu_index on that channel      = sensor_id % 8
///   5    1     reserved, 0
///   6    4     measured_at tick (u32)
///   10   4     arrives_at tick (u32)
///   14   16    qw qx qy qz (IEEE-754 binary32)
///   30   2     checksum: ones' complement of the ones'-complement sum of
///              the 14 little-endian 16-bit words in bytes 2..29
inline constexpr std::size_t kPacketSize = 32;
inline constexpr std::uint8_t kSync0 = 0xA5;
inline constexpr std::uint8_t kSync1 = 0x5A;
inline constexpr int kImusPerChannel = 8;

using PacketFrame = std::array<std::uint8_t, kPacketSize>;

enum class PacketError { BadSync, BadChecksum, Truncated, BadField };

std::string_view to_string(PacketError e);

struct DecodeResult {
  std::optional<MeasurementEvent> event;
  std::optional<PacketError> error;

  bool ok() const { return event.has_value(); }
};

// Throws std::invalid_argument when sensor_id or a tick does not fit the frame.
PacketFrame encode_packet(const MeasurementEvent& event);

// Decodes the first kPacketSize bytes.
DecodeResult decode_packet(std::span<const std::uint8_t> bytes);

std::uint16_t ones_complement_checksum(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_stream(std::span<const MeasurementEvent> events);

struct StreamDecodeResult {
  std::vector<MeasurementEvent> events;
  std::optional<PacketError> error;
  std::size_t error_offset = 0;
};

// Stops at the first malformed frame.
StreamDecodeResult decode_stream(std::span<const std::uint8_t> bytes);

}  // namespace handcept::sim
