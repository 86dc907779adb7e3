#include "greenmesh/utc.hpp"

#include <chrono>
#include <cstdio>

#include "greenmesh/errors.hpp"

namespace greenmesh {

std::string date_string(std::int64_t day) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::int64_t parse_date(const std::string& text) {
    using namespace std::chrono;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char tail = 0;
    if (text.size() != 10 || std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
        throw ConfigError("malformed date '" + text + "', expected YYYY-MM-DD");
    }
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw ConfigError("invalid calendar date '" + text + "'");
    return sys_days{ymd}.time_since_epoch().count();
}

std::string datetime_string(UtcSeconds t) {
    const auto day = day_index(t);
    const auto sec = t - day_start(day);
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(sec / 3600),
                  static_cast<int>(sec / 60 % 60), static_cast<int>(sec % 60));
    return date_string(day) + buf;
}

double hour_of_day(UtcSeconds t) {
    return static_cast<double>(t - day_start(day_index(t))) / 3600.0;
}

}  // namespace greenmesh
