#pragma once

// Shared wire and storage formats.
//
// Data packet payload (64 bytes, little-endian):
//   0  u8      station id
//   1  u8      sample flags (kFlagClamped)
//   2  u16     UVI x 100
//   4  u32     trigger sequence
//   8  u64     sample timestamp, UTC seconds
//   16 i32[12] readings in milli-units, height-major
//              (ankle, abdomen, head) x (t_a mdegC, t_g mdegC, wind mV, RH m%)
//
// Measurement record (72 bytes, little-endian):
//   0  u32     trigger sequence
//   4  u8      station id
//   5  u8      delivery hop count
//   6  u8      status flags
//   7  u8      reserved, zero
//   8  u64     sample timestamp, UTC seconds
//   16 i32[12] readings as in the payload
//   64 u16     UVI x 100
//   66 i16     worst-link RSSI on the delivery path, dBm x 10
//   68 u8[4]   reserved, zero
//
// A missing record carries kFlagMissing and all-bits-one in every reading,
// UVI, RSSI and hop field.

#include <array>
#include <cstdint>
#include <span>

#include "greenmesh/station.hpp"

namespace greenmesh::record {

inline constexpr std::size_t kPayloadSize = 64;
inline constexpr std::size_t kRecordSize = 72;

inline constexpr std::uint8_t kFlagMissing = 0x01;
inline constexpr std::uint8_t kFlagNoData = 0x02;
inline constexpr std::uint8_t kFlagStale = 0x04;
inline constexpr std::uint8_t kFlagClamped = 0x08;
inline constexpr std::uint8_t kFlagUnreachable = 0x10;

inline constexpr std::int32_t kMissingReading = -1;  // 0xffffffff
inline constexpr std::uint16_t kMissingUvi = 0xffff;
inline constexpr std::int16_t kMissingRssi = -1;     // 0xffff
inline constexpr std::uint8_t kMissingHops = 0xff;

/// Index of channel `c` (0 t_a, 1 t_g, 2 wind, 3 RH) at height `h`.
constexpr std::size_t reading_index(std::size_t h, std::size_t c) { return h * 4 + c; }

struct MeasurementRecord {
    std::uint32_t sequence = 0;
    std::uint64_t timestamp = 0;
    std::uint8_t station = 0;
    std::array<std::int32_t, 12> readings{};
    std::uint16_t uvi_centi = 0;
    std::int16_t rssi_deci = 0;
    std::uint8_t hops = 0;
    std::uint8_t flags = 0;

    bool missing() const { return (flags & kFlagMissing) != 0; }
    bool operator==(const MeasurementRecord&) const = default;
};

using PayloadBytes = std::array<std::uint8_t, kPayloadSize>;
using RecordBytes = std::array<std::uint8_t, kRecordSize>;

/// Rounds to the storage resolution (milli-units, UVI in hundredths).
std::int32_t to_milli(double v);
double from_milli(std::int32_t v);

PayloadBytes encode_payload(const station::ClimateSample& sample);

/// Payload fields as an integer record (hops, RSSI and status left zero).
MeasurementRecord decode_payload(std::span<const std::uint8_t> bytes);

RecordBytes encode_record(const MeasurementRecord& r);
MeasurementRecord decode_record(std::span<const std::uint8_t> bytes);

MeasurementRecord missing_record(std::uint8_t station, std::uint32_t sequence,
                                 std::uint64_t timestamp, std::uint8_t extra_flags);

}  // namespace greenmesh::record
