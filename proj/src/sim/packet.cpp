#include "handcept/sim/packet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace handcept::sim {
namespace {

void put_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v & 0xFF);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    p[i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF);
  }
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (static_cast<std::uint16_t>(p[1]) << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  }
  return v;
}

void put_f32(std::uint8_t* p, double v) { put_u32(p, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

double get_f32(const std::uint8_t* p) { return static_cast<double>(std::bit_cast<float>(get_u32(p))); }

constexpr std::size_t kChecksumOffset = 30;

}  // namespace

std::string_view to_string(PacketError e) {
  switch (e) {
    case PacketError::BadSync:
      return "bad_sync";
    case PacketError::BadChecksum:
      return "bad_checksum";
    case PacketError::Truncated:
      return "truncated";
    case PacketError::BadField:
      return "bad_field";
  }
  return "unknown";
}

std::uint16_t ones_complement_checksum(std::span<const std::uint8_t> bytes) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
    sum += static_cast<std::uint32_t>(bytes[i]) | (static_cast<std::uint32_t>(bytes[i + 1]) << 8);
  }
  if (bytes.size() % 2 != 0) {
    sum += bytes.back();
  }
  while (sum >> 16) {
    sum = (sum & 0xFFFF) + (sum >> 16);
  }
  return static_cast<std::uint16_t>(~sum & 0xFFFF);
}

PacketFrame encode_packet(const MeasurementEvent& event) {
  constexpr auto kMaxTick = static_cast<Tick>(std::numeric_limits<std::uint32_t>::max());
  if (event.sensor_id < 0 || event.sensor_id >= 256 * kImusPerChannel) {
    throw std::invalid_argument("sensor id does not fit a bus address");
  }
  if (event.measured_at < 0 || event.measured_at > kMaxTick || event.arrives_at < 0 ||
      event.arrives_at > kMaxTick) {
    throw std::invalid_argument("tick does not fit a 32-bit field");
  }
  PacketFrame f{};
  f[0] = kSync0;
  f[1] = kSync1;
  f[2] = static_cast<std::uint8_t>(event.kind);
  f[3] = static_cast<std::uint8_t>(event.sensor_id / kImusPerChannel);
  f[4] = static_cast<std::uint8_t>(event.sensor_id % kImusPerChannel);
  f[5] = 0;
  put_u32(&f[6], static_cast<std::uint32_t>(event.measured_at));
  put_u32(&f[10], static_cast<std::uint32_t>(event.arrives_at));
  put_f32(&f[14], event.payload.w());
  put_f32(&f[18], event.payload.x());
  put_f32(&f[22], event.payload.y());
  put_f32(&f[26], event.payload.z());
  put_u16(&f[kChecksumOffset], ones_complement_checksum(std::span(f).subspan(2, 28)));
  return f;
}

DecodeResult decode_packet(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && (bytes[0] != kSync0 || bytes[1] != kSync1)) {
    return {std::nullopt, PacketError::BadSync};
  }
  if (bytes.size() == 1 && bytes[0] != kSync0) {
    return {std::nullopt, PacketError::BadSync};
  }
  if (bytes.size() < kPacketSize) {
    return {std::nullopt, PacketError::Truncated};
  }
  const std::uint8_t* p = bytes.data();
  if (ones_complement_checksum(bytes.subspan(2, 28)) != get_u16(p + kChecksumOffset)) {
    return {std::nullopt, PacketError::BadChecksum};
  }
  if (p[2] > 1 || p[4] >= kImusPerChannel || p[5] != 0) {
    return {std::nullopt, PacketError::BadField};
  }
  MeasurementEvent e;
  e.kind = static_cast<SensorKind>(p[2]);
  e.sensor_id = p[3] * kImusPerChannel + p[4];
  e.measured_at = get_u32(p + 6);
  e.arrives_at = get_u32(p + 10);
  const double w = get_f32(p + 14), x = get_f32(p + 18), y = get_f32(p + 22), z = get_f32(p + 26);
  if (!(std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z)) ||
      (w == 0.0 && x == 0.0 && y == 0.0 && z == 0.0) || e.arrives_at < e.measured_at) {
    return {std::nullopt, PacketError::BadField};
  }
  e.payload = rot::UnitQuaternion(w, x, y, z);
  return {e, std::nullopt};
}

std::vector<std::uint8_t> encode_stream(std::span<const MeasurementEvent> events) {
  std::vector<std::uint8_t> out;
  out.reserve(events.size() * kPacketSize);
  for (const auto& e : events) {
    const PacketFrame f = encode_packet(e);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

StreamDecodeResult decode_stream(std::span<const std::uint8_t> bytes) {
  StreamDecodeResult out;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const DecodeResult r = decode_packet(bytes.subspan(offset, std::min(kPacketSize, bytes.size() - offset)));
    if (!r.ok()) {
      out.error = r.error;
      out.error_offset = offset;
      return out;
    }
    out.events.push_back(*r.event);
    offset += kPacketSize;
  }
  return out;
}

}  // namespace handcept::sim
