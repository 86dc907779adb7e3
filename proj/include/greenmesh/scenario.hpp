#pragma once

// Scenario files: a JSON document describing one end-to-end run. Only
// `name`, `seed` and `days` are required; everything else falls back to the
// defaults of the owning module. Schema in docs/scenario-format.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "greenmesh/collector.hpp"
#include "greenmesh/field.hpp"
#include "greenmesh/radio.hpp"
#include "greenmesh/station.hpp"

namespace greenmesh::scenario {

struct ReconfigPolicy {
    std::size_t window = 100;    // link outcomes per monitored link
    double threshold = 0.5;      // delivery rate triggering a recomputation
    bool enabled = true;
};

struct AnalysisConfig {
    std::int64_t debounce_s = 0;
    bool wind_calibrated = false;
    station::CalibrationCurve wind_calibration = station::CalibrationCurve::uncalibrated_default();
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    std::int64_t start_day = 0;  // days since the epoch
    std::vector<field::DayType> days;
    field::DefaultProfiles profiles = field::default_profiles();
    field::GreenhouseGeometry geometry = field::GreenhouseGeometry::standard();
    std::vector<std::uint8_t> stations;  // subset of geometry sites; all by default
    station::SensorSuite sensors;
    collector::PollSchedule schedule;
    radio::LinkParams link;
    radio::PlantGrowth plants;
    ReconfigPolicy reconfig;
    AnalysisConfig analysis;

    std::vector<field::DayProfile> day_profiles() const;
    UtcSeconds start_time() const { return day_start(start_day); }
    UtcSeconds end_time() const { return day_start(start_day + static_cast<std::int64_t>(days.size())); }

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
};

/// Parses and validates. Unknown keys are rejected.
Scenario parse_scenario(const std::string& json_text);

/// A bundled scenario name, or a path to a scenario file.
Scenario load_scenario(const std::string& name_or_path);

std::vector<std::string> bundled_scenario_names();
std::optional<std::string> bundled_scenario_text(const std::string& name);

}  // namespace greenmesh::scenario
