#include "greenmesh/record.hpp"

#include <cmath>
#include <limits>
#include <type_traits>

#include "greenmesh/errors.hpp"

namespace greenmesh::record {
namespace {

template <typename T>
void put(std::uint8_t* out, T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out[i] = static_cast<std::uint8_t>(u & 0xffu);
        u = static_cast<U>(u >> 8);
    }
}

template <typename T>
T get(const std::uint8_t* in) {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | in[i]);
    return static_cast<T>(u);
}

std::uint16_t to_centi(double uvi) {
    const double c = std::round(uvi * 100.0);
    if (!(c >= 0.0 && c < 65535.0)) throw FormatError("UVI outside storable range");
    return static_cast<std::uint16_t>(c);
}

}  // namespace

std::int32_t to_milli(double v) {
    const double m = std::round(v * 1000.0);
    if (!(m > std::numeric_limits<std::int32_t>::min() && m <= std::numeric_limits<std::int32_t>::max())) {
        throw FormatError("reading outside storable range");
    }
    return static_cast<std::int32_t>(m);
}

double from_milli(std::int32_t v) { return static_cast<double>(v) / 1000.0; }

PayloadBytes encode_payload(const station::ClimateSample& s) {
    PayloadBytes b{};
    b[0] = s.station;
    b[1] = s.clamped ? kFlagClamped : 0;
    put<std::uint16_t>(&b[2], to_centi(s.uvi));
    put<std::uint32_t>(&b[4], s.sequence);
    put<std::uint64_t>(&b[8], static_cast<std::uint64_t>(s.timestamp));
    for (std::size_t h = 0; h < 3; ++h) {
        const auto& r = s.heights[h];
        const double values[4] = {r.air_temp, r.globe_temp, r.wind_volts, r.relative_humidity};
        for (std::size_t c = 0; c < 4; ++c) {
            put<std::int32_t>(&b[16 + 4 * reading_index(h, c)], to_milli(values[c]));
        }
    }
    return b;
}

MeasurementRecord decode_payload(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kPayloadSize) throw FormatError("data payload must be 64 bytes");
    MeasurementRecord r;
    r.station = bytes[0];
    r.flags = bytes[1] & kFlagClamped;
    r.uvi_centi = get<std::uint16_t>(&bytes[2]);
    r.sequence = get<std::uint32_t>(&bytes[4]);
    r.timestamp = get<std::uint64_t>(&bytes[8]);
    for (std::size_t i = 0; i < 12; ++i) r.readings[i] = get<std::int32_t>(&bytes[16 + 4 * i]);
    return r;
}

RecordBytes encode_record(const MeasurementRecord& r) {
    RecordBytes b{};
    put<std::uint32_t>(&b[0], r.sequence);
    b[4] = r.station;
    b[5] = r.hops;
    b[6] = r.flags;
    put<std::uint64_t>(&b[8], r.timestamp);
    for (std::size_t i = 0; i < 12; ++i) put<std::int32_t>(&b[16 + 4 * i], r.readings[i]);
    put<std::uint16_t>(&b[64], r.uvi_centi);
    put<std::int16_t>(&b[66], r.rssi_deci);
    return b;
}

MeasurementRecord decode_record(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kRecordSize) throw FormatError("measurement record must be 72 bytes");
    if (bytes[7] != 0 || bytes[68] != 0 || bytes[69] != 0 || bytes[70] != 0 || bytes[71] != 0) {
        throw FormatError("measurement record has non-zero reserved bytes");
    }
    MeasurementRecord r;
    r.sequence = get<std::uint32_t>(&bytes[0]);
    r.station = bytes[4];
    r.hops = bytes[5];
    r.flags = bytes[6];
    r.timestamp = get<std::uint64_t>(&bytes[8]);
    for (std::size_t i = 0; i < 12; ++i) r.readings[i] = get<std::int32_t>(&bytes[16 + 4 * i]);
    r.uvi_centi = get<std::uint16_t>(&bytes[64]);
    r.rssi_deci = get<std::int16_t>(&bytes[66]);
    return r;
}

MeasurementRecord missing_record(std::uint8_t station, std::uint32_t sequence,
                                 std::uint64_t timestamp, std::uint8_t extra_flags) {
    MeasurementRecord r;
    r.station = station;
    r.sequence = sequence;
    r.timestamp = timestamp;
    r.readings.fill(kMissingReading);
    r.uvi_centi = kMissingUvi;
    r.rssi_deci = kMissingRssi;
    r.hops = kMissingHops;
    r.flags = static_cast<std::uint8_t>(kFlagMissing | extra_flags);
    return r;
}

}  // namespace greenmesh::record
