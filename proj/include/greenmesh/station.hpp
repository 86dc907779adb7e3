#pragma once

// Measurement station: sensor error models for the 13 channels and the
// station side of the trigger/poll protocol.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "greenmesh/field.hpp"
#include "greenmesh/radio.hpp"
#include "greenmesh/rng.hpp"
#include "greenmesh/utc.hpp"

namespace greenmesh::station {

enum class SensorKind : std::uint8_t { air_temp, globe_temp, air_velocity, relative_humidity, uv };

struct SensorSpec {
    SensorKind kind = SensorKind::air_temp;
    double range_min = 0.0;
    double range_max = 1.0;
    double accuracy = 0.0;           // absolute, native units
    double relative_accuracy = 0.0;  // fraction of the reading
    double counts_per_unit = 1000.0; // quantisation: 1 / step
    double noise_sigma_fraction = 0.5;  // noise std as a fraction of the accuracy bound
    bool noise_enabled = true;

    double accuracy_at(double truth) const;
    double step() const { return 1.0 / counts_per_unit; }
    void validate() const;
};

/// Instrument characteristics of the station probes.
SensorSpec default_spec(SensorKind kind);

struct SensorReading {
    double value = 0.0;
    bool clamped = false;
};

/// clamp(truth + offset + noise, range), quantised. `offset_fraction` in
/// [-1, 1] scales the systematic offset against the accuracy bound.
SensorReading read_sensor(const SensorSpec& spec, double truth, Rng& rng, double offset_fraction = 0.0);

/// Piecewise-linear curve with strictly ascending abscissae and
/// non-decreasing ordinates.
struct CalibrationCurve {
    std::vector<std::pair<double, double>> points;
    bool calibrated = false;

    /// Placeholder mapping 0-5 V onto the 0-20 m/s probe range.
    static CalibrationCurve uncalibrated_default();

    void validate() const;
    CalibrationCurve inverse() const;
};

struct CalibratedValue {
    double value = 0.0;
    bool clamped = false;
};

/// Volts to m/s through the curve; inputs outside the curve domain clamp to
/// its end points and raise the flag.
CalibratedValue wind_calibration(double volts, const CalibrationCurve& curve);

struct HeightReading {
    double air_temp = 0.0;     // degC
    double globe_temp = 0.0;   // degC
    double wind_volts = 0.0;   // raw anemometer output
    double relative_humidity = 0.0;  // percent
};

struct ClimateSample {
    std::uint8_t station = 0;
    std::uint32_t sequence = 0;
    UtcSeconds timestamp = 0;
    std::array<HeightReading, 3> heights{};
    double uvi = 0.0;          // head-height sensor only
    bool clamped = false;      // some channel saturated at its range
    double path_rssi_db = 0.0; // filled in by the collector on delivery
};

struct TriggerPacket {
    std::uint32_t sequence = 0;
    UtcSeconds timestamp = 0;
};

struct SensorSuite {
    SensorSpec air_temp = default_spec(SensorKind::air_temp);
    SensorSpec globe_temp = default_spec(SensorKind::globe_temp);
    SensorSpec air_velocity = default_spec(SensorKind::air_velocity);
    SensorSpec relative_humidity = default_spec(SensorKind::relative_humidity);
    SensorSpec uv = default_spec(SensorKind::uv);
    /// True anemometer transfer, m/s to volts.
    CalibrationCurve wind_transfer = CalibrationCurve::uncalibrated_default().inverse();
    std::array<double, 3> heights_m{0.23, 0.93, 1.56};
    bool systematic_offsets = true;

    /// Noise and systematic offsets off.
    static SensorSuite ideal();
};

class Station {
public:
    Station(field::StationSite site, SensorSuite sensors, std::uint64_t seed);

    std::uint8_t id() const { return site_.id; }
    const field::StationSite& site() const { return site_; }
    std::uint32_t last_sequence() const { return last_sequence_; }
    const std::optional<ClimateSample>& buffered() const { return buffered_; }

    /// Samples every channel at the trigger timestamp. Stale or duplicate
    /// triggers are ignored; returns whether a new sample was buffered.
    bool on_trigger(const TriggerPacket& trigger, const field::ClimateField& field);

    /// Data packet carrying the buffered sample, or a no-data packet before
    /// the first trigger. Identical polls yield identical packets.
    radio::Packet on_poll(const radio::Packet& poll) const;

private:
    double offset(std::size_t channel) const { return offsets_[channel]; }

    field::StationSite site_;
    SensorSuite sensors_;
    std::uint64_t seed_;
    std::array<double, 13> offsets_{};
    std::uint32_t last_sequence_ = 0;
    std::optional<ClimateSample> buffered_;
};

}  // namespace greenmesh::station
