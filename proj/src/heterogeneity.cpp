#include "greenmesh/heterogeneity.hpp"

#include <cmath>

#include "greenmesh/errors.hpp"

namespace greenmesh::heterogeneity {
namespace {

void require_finite(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite value in weighted vertical mean");
}

void finish(HomogeneityVerdict& v) {
    v.limit = homogeneity_limit(v.parameter, v.mean);
    if (!v.limit) {
        v.classification = Classification::not_applicable;
        return;
    }
    for (const auto& lv : v.values) {
        if (std::abs(lv.value - v.mean) > *v.limit) v.offenders.push_back(lv);
    }
    v.classification =
        v.offenders.empty() ? Classification::homogeneous : Classification::heterogeneous;
}

}  // namespace

const char* to_string(Height h) {
    switch (h) {
        case Height::ankle: return "ankle";
        case Height::abdomen: return "abdomen";
        case Height::head: return "head";
    }
    return "?";
}

const char* to_string(ParameterKind kind) {
    switch (kind) {
        case ParameterKind::air_temp: return "air_temp";
        case ParameterKind::mean_radiant_temp: return "mean_radiant_temp";
        case ParameterKind::air_velocity: return "air_velocity";
        case ParameterKind::vapour_pressure: return "vapour_pressure";
    }
    return "?";
}

ParameterKind parse_kind(const std::string& name) {
    for (auto k : kAllKinds) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown parameter kind '" + name + "'");
}

const char* to_string(Axis axis) { return axis == Axis::vertical ? "vertical" : "horizontal"; }

const char* to_string(Classification c) {
    switch (c) {
        case Classification::homogeneous: return "homogeneous";
        case Classification::heterogeneous: return "heterogeneous";
        case Classification::not_applicable: return "limit_not_applicable";
    }
    return "?";
}

double value_of(const climate::BasicParameters& p, ParameterKind kind) {
    switch (kind) {
        case ParameterKind::air_temp: return p.air_temp;
        case ParameterKind::mean_radiant_temp: return p.mean_radiant_temp;
        case ParameterKind::air_velocity: return p.air_velocity;
        case ParameterKind::vapour_pressure: return p.vapour_pressure;
    }
    return 0.0;
}

bool has_data(const Snapshot& snapshot) {
    for (const auto& s : snapshot.stations) {
        for (const auto& h : s.heights) {
            if (h) return true;
        }
    }
    return false;
}

double weighted_vertical_mean(double ankle, double abdomen, double head) {
    require_finite(ankle);
    require_finite(abdomen);
    require_finite(head);
    return (ankle + 2.0 * abdomen + head) / 4.0;
}

std::optional<double> homogeneity_limit(ParameterKind kind, double mean) {
    switch (kind) {
        case ParameterKind::air_temp:
            if (!(mean > 0.0 && mean < 50.0)) return std::nullopt;
            return 2.0;
        case ParameterKind::mean_radiant_temp:
            if (!(mean > 0.0 && mean < 50.0)) return std::nullopt;
            return 10.0;
        case ParameterKind::air_velocity: return 0.3 + 0.15 * mean;
        case ParameterKind::vapour_pressure: return 0.45;
    }
    return std::nullopt;
}

HomogeneityVerdict assess_vertical(const Snapshot& snapshot, ParameterKind kind) {
    HomogeneityVerdict v;
    v.timestamp = snapshot.timestamp;
    v.parameter = kind;
    v.axis = Axis::vertical;

    double weighted_sum = 0.0;
    double weight_total = 0.0;
    for (std::size_t plane = 0; plane < kHeights.size(); ++plane) {
        double sum = 0.0;
        int n = 0;
        for (const auto& s : snapshot.stations) {
            if (const auto& p = s.heights[plane]) {
                sum += value_of(*p, kind);
                ++n;
            }
        }
        if (n == 0) {
            v.excluded.push_back(static_cast<std::uint8_t>(plane));
            continue;
        }
        const double plane_mean = sum / n;
        v.values.push_back({static_cast<std::uint8_t>(plane), plane_mean});
        weighted_sum += kHeightWeights[plane] * plane_mean;
        weight_total += kHeightWeights[plane];
    }
    if (v.values.empty()) throw DomainError("vertical assessment: no station data in snapshot");
    v.mean = weighted_sum / weight_total;
    finish(v);
    return v;
}

HomogeneityVerdict assess_horizontal(const Snapshot& snapshot, ParameterKind kind) {
    HomogeneityVerdict v;
    v.timestamp = snapshot.timestamp;
    v.parameter = kind;
    v.axis = Axis::horizontal;

    double sum = 0.0;
    for (const auto& s : snapshot.stations) {
        double weighted = 0.0;
        double weight_total = 0.0;
        for (std::size_t plane = 0; plane < kHeights.size(); ++plane) {
            if (const auto& p = s.heights[plane]) {
                weighted += kHeightWeights[plane] * value_of(*p, kind);
                weight_total += kHeightWeights[plane];
            }
        }
        // A station counts only with all three heights; a partial profile
        // would bias its weighted mean toward the surviving planes.
        if (weight_total < 4.0) {
            v.excluded.push_back(s.station);
            continue;
        }
        const double station_mean = weighted / weight_total;
        v.values.push_back({s.station, station_mean});
        sum += station_mean;
    }
    if (v.values.empty()) throw DomainError("horizontal assessment: no station data in snapshot");
    v.mean = sum / static_cast<double>(v.values.size());
    finish(v);
    return v;
}

HomogeneityVerdict assess(const Snapshot& snapshot, ParameterKind kind, Axis axis) {
    return axis == Axis::vertical ? assess_vertical(snapshot, kind)
                                  : assess_horizontal(snapshot, kind);
}

std::vector<Interval> heterogeneity_intervals(std::span<const HomogeneityVerdict> series,
                                              std::int64_t debounce_s) {
    std::vector<Interval> out;
    bool in_run = false;
    for (const auto& v : series) {
        if (v.heterogeneous()) {
            if (in_run) {
                out.back().end = v.timestamp;
            } else if (!out.empty() && v.timestamp - out.back().end < debounce_s) {
                out.back().end = v.timestamp;
                in_run = true;
            } else {
                out.push_back({v.timestamp, v.timestamp});
                in_run = true;
            }
        } else {
            in_run = false;
        }
    }
    return out;
}

std::vector<Interval> heterogeneity_intervals(std::span<const Snapshot> series, ParameterKind kind,
                                              Axis axis, std::int64_t debounce_s) {
    std::vector<HomogeneityVerdict> verdicts;
    verdicts.reserve(series.size());
    for (const auto& s : series) {
        if (!has_data(s)) continue;
        verdicts.push_back(assess(s, kind, axis));
    }
    return heterogeneity_intervals(verdicts, debounce_s);
}

}  // namespace greenmesh::heterogeneity
