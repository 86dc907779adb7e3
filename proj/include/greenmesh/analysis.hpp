#pragma once

// Heterogeneity analysis over a stored run: stored records are turned into
// basic-parameter snapshots, assessed per timestamp on both axes, and
// reduced to per-day interval lists and plotting tables.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "greenmesh/climate.hpp"
#include "greenmesh/heterogeneity.hpp"
#include "greenmesh/record.hpp"
#include "greenmesh/station.hpp"

namespace greenmesh::analysis {

namespace fs = std::filesystem;

struct StoredStation {
    std::uint8_t id = 0;
    bool outdoor = false;
};

/// Interpretation context written next to the data (store.json).
struct StoreContext {
    std::string scenario;
    std::vector<StoredStation> stations;
    std::int64_t debounce_s = 0;
    station::CalibrationCurve wind_calibration = station::CalibrationCurve::uncalibrated_default();

    std::vector<std::uint8_t> indoor_ids() const;
    std::string to_json() const;
    static StoreContext from_json(const std::string& text);
};

void write_store_context(const fs::path& root, const StoreContext& ctx);

/// Reads store.json; without one, the standard station layout and an
/// uncalibrated anemometer are assumed.
StoreContext read_store_context(const fs::path& root);

/// Derived quantities of one height of one record.
struct HeightValues {
    double air_temp = 0.0;
    double globe_temp = 0.0;
    double wind_volts = 0.0;
    double air_velocity = 0.0;  // through the wind calibration curve
    bool velocity_clamped = false;
    double relative_humidity = 0.0;
    double vapour_pressure = 0.0;
    double mean_radiant_temp = 0.0;
    climate::ConvectionRegime regime = climate::ConvectionRegime::natural;
};

/// Empty for missing records or readings outside the formula domains.
/// With an uncalibrated wind channel, t_r always uses natural convection.
std::optional<HeightValues> height_values(const record::MeasurementRecord& r, std::size_t height,
                                          const station::CalibrationCurve& wind);

struct AnalysisOptions {
    std::vector<heterogeneity::ParameterKind> kinds{heterogeneity::ParameterKind::air_temp,
                                                    heterogeneity::ParameterKind::mean_radiant_temp};
    std::optional<std::int64_t> debounce_s;  // overrides the store context
};

using SeriesKey = std::pair<heterogeneity::ParameterKind, heterogeneity::Axis>;

struct DayReport {
    std::int64_t day = 0;
    std::size_t snapshots = 0;
    std::size_t empty_snapshots = 0;
    std::size_t natural_regime = 0;  // height readings per t_r regime
    std::size_t forced_regime = 0;
    std::map<SeriesKey, std::vector<heterogeneity::HomogeneityVerdict>> verdicts;
    std::map<SeriesKey, std::vector<heterogeneity::Interval>> intervals;

    const std::vector<heterogeneity::Interval>& intervals_for(heterogeneity::ParameterKind kind,
                                                              heterogeneity::Axis axis) const;
};

struct Report {
    std::string scenario;
    bool wind_calibrated = false;
    std::int64_t debounce_s = 0;
    std::vector<heterogeneity::ParameterKind> kinds;
    std::vector<DayReport> days;

    std::string to_json() const;
};

/// Snapshots of the indoor stations for one stored day, ordered by
/// timestamp; missing records appear as stations without heights.
std::vector<heterogeneity::Snapshot> day_snapshots(const fs::path& root, std::int64_t day,
                                                   const StoreContext& ctx, std::size_t* natural = nullptr,
                                                   std::size_t* forced = nullptr);

/// Analyses every closed day. Throws NotReadyError when there is none.
Report analyze(const fs::path& root, const AnalysisOptions& options = {});

/// verdicts.csv, intervals.csv, planes.csv, stations.csv and report.json.
void write_report(const Report& report, const fs::path& out_dir);

inline constexpr std::array<double, 10> kEnvelopeVelocities{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

struct EnvelopeRow {
    std::int64_t timestamp = 0;
    double air_temp = 0.0;   // weighted vertical mean
    double globe_temp = 0.0;
    double natural = 0.0;
    std::array<double, kEnvelopeVelocities.size()> forced{};
};

/// Natural and forced-convection t_r for one station and day, each curve
/// the weighted vertical mean of the per-height values. Timestamps with a
/// missing record or height are skipped.
std::vector<EnvelopeRow> radiant_envelope(const fs::path& root, std::uint8_t station, std::int64_t day);

void write_envelope_csv(const std::vector<EnvelopeRow>& rows, std::ostream& out);

/// One row per record and height over every stored day.
void export_csv(const fs::path& root, std::ostream& out);

}  // namespace greenmesh::analysis
