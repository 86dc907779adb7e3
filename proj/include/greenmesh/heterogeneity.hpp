#pragma once

// Homogeneity classification of a measured space: weighted means over the
// three measurement heights, admissible deviations per basic parameter, and
// vertical/horizontal verdicts.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greenmesh/climate.hpp"

namespace greenmesh::heterogeneity {

enum class Height : std::uint8_t { ankle = 0, abdomen = 1, head = 2 };

inline constexpr std::array<Height, 3> kHeights{Height::ankle, Height::abdomen, Height::head};
inline constexpr std::array<double, 3> kDefaultHeightsM{0.23, 0.93, 1.56};
inline constexpr std::array<double, 3> kHeightWeights{1.0, 2.0, 1.0};

const char* to_string(Height h);

enum class ParameterKind : std::uint8_t { air_temp, mean_radiant_temp, air_velocity, vapour_pressure };

inline constexpr std::array<ParameterKind, 4> kAllKinds{
    ParameterKind::air_temp, ParameterKind::mean_radiant_temp, ParameterKind::air_velocity,
    ParameterKind::vapour_pressure};

const char* to_string(ParameterKind kind);
ParameterKind parse_kind(const std::string& name);

enum class Axis : std::uint8_t { vertical, horizontal };

const char* to_string(Axis axis);

enum class Classification : std::uint8_t { homogeneous, heterogeneous, not_applicable };

const char* to_string(Classification c);

double value_of(const climate::BasicParameters& p, ParameterKind kind);

/// Readings of one station at the three heights; a missing packet or
/// channel is an empty optional.
struct StationSnapshot {
    std::uint8_t station = 0;
    std::array<std::optional<climate::BasicParameters>, 3> heights;
};

struct Snapshot {
    std::int64_t timestamp = 0;  // UTC seconds
    std::vector<StationSnapshot> stations;
};

bool has_data(const Snapshot& snapshot);

/// A plane index (0..2, vertical axis) or station id (horizontal axis)
/// together with the value compared against the band.
struct LocatedValue {
    std::uint8_t location = 0;
    double value = 0.0;
};

struct HomogeneityVerdict {
    std::int64_t timestamp = 0;
    ParameterKind parameter = ParameterKind::air_temp;
    Axis axis = Axis::vertical;
    double mean = 0.0;
    std::optional<double> limit;  // empty when the band does not apply
    std::vector<LocatedValue> values;
    std::vector<LocatedValue> offenders;
    std::vector<std::uint8_t> excluded;  // planes or stations with no data
    Classification classification = Classification::homogeneous;

    bool homogeneous() const { return offenders.empty(); }
    bool heterogeneous() const { return classification == Classification::heterogeneous; }
};

/// Ankle/abdomen/head combined with weights 1, 2, 1.
double weighted_vertical_mean(double ankle, double abdomen, double head);

/// Half-width of the admissible band around `mean`. Empty when the mean
/// is outside the validity window of a temperature limit (0, 50) degC.
std::optional<double> homogeneity_limit(ParameterKind kind, double mean);

HomogeneityVerdict assess_vertical(const Snapshot& snapshot, ParameterKind kind);
HomogeneityVerdict assess_horizontal(const Snapshot& snapshot, ParameterKind kind);
HomogeneityVerdict assess(const Snapshot& snapshot, ParameterKind kind, Axis axis);

struct Interval {
    std::int64_t start = 0;  // first heterogeneous timestamp
    std::int64_t end = 0;    // last heterogeneous timestamp
    std::int64_t duration() const { return end - start; }
};

/// Maximal runs of heterogeneous verdicts (time-ordered input). Runs whose
/// separating gap is shorter than `debounce_s` are merged; with the default
/// of zero every run stays distinct.
std::vector<Interval> heterogeneity_intervals(std::span<const HomogeneityVerdict> series,
                                              std::int64_t debounce_s = 0);

/// Same, assessing each snapshot first. Snapshots without any data are
/// skipped rather than breaking a run.
std::vector<Interval> heterogeneity_intervals(std::span<const Snapshot> series, ParameterKind kind,
                                              Axis axis, std::int64_t debounce_s = 0);

}  // namespace greenmesh::heterogeneity
