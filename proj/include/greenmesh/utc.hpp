#pragma once

#include <cstdint>
#include <string>

namespace greenmesh {

/// Seconds since 1970-01-01T00:00:00Z.
using UtcSeconds = std::int64_t;

inline constexpr UtcSeconds kSecondsPerDay = 86400;

/// Days since the epoch containing `t` (floor division).
constexpr std::int64_t day_index(UtcSeconds t) {
    return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
}

constexpr UtcSeconds day_start(std::int64_t day) { return day * kSecondsPerDay; }

/// "YYYY-MM-DD" for a day index.
std::string date_string(std::int64_t day);

/// Parses "YYYY-MM-DD"; throws ConfigError on malformed input.
std::int64_t parse_date(const std::string& text);

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string datetime_string(UtcSeconds t);

/// Hours since the start of the UTC day, in [0, 24).
double hour_of_day(UtcSeconds t);

}  // namespace greenmesh
