#pragma once

// Synthetic ground-truth climate over the greenhouse volume. The field is a
// sum of smooth separable terms (diurnal curve, solar-driven vertical
// gradient, fixed horizontal anomalies, seeded value noise) rather than a
// physical model.

#include <cstdint>
#include <string>
#include <vector>

#include "greenmesh/climate.hpp"
#include "greenmesh/utc.hpp"

namespace greenmesh::field {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct StationSite {
    std::uint8_t id = 0;
    Point2 position;
    bool outdoor = false;
};

struct GreenhouseGeometry {
    double width_m = 32.0;
    double depth_m = 32.0;
    double eave_height_m = 3.40;
    double ridge_height_m = 4.10;
    std::vector<StationSite> stations;
    Point2 collector{17.0, 31.0};
    /// Horizontal radius around an outdoor station where the field is defined.
    double outdoor_radius_m = 2.0;

    /// 32 m x 32 m Almeria-type greenhouse with the 3 x 4 indoor grid
    /// (MS-1 ... MS-12) and MS-13 outdoors.
    static GreenhouseGeometry standard();

    double roof_height(double x) const;
    bool inside(double x, double y, double z) const;
    bool near_outdoor_station(double x, double y, double z) const;
    const StationSite& station(std::uint8_t id) const;
    std::vector<std::uint8_t> indoor_ids() const;

    /// Throws ConfigError when indoor sites fall outside the footprint or
    /// outdoor sites inside it.
    void validate() const;
};

enum class DayType { sunny, cloudy };

const char* to_string(DayType t);

struct DayProfile {
    DayType type = DayType::sunny;

    // Diurnal base air temperature at mid-height.
    double temp_min_c = 8.0;
    double temp_max_c = 24.0;
    double temp_min_hour = 7.0;
    double temp_max_hour = 13.5;

    double sunrise_hour = 7.5;
    double sunset_hour = 17.25;

    // Air temperature difference head minus ankle, as a bump in time.
    double vertical_gradient_c = 8.0;
    double vertical_center_hour = 11.5;
    double vertical_half_width_h = 4.0;

    // Horizontal anomalies follow the vertical bump with a lag.
    double horizontal_scale = 1.0;
    double horizontal_lag_h = 1.5;
    double horizontal_half_width_h = 4.0;
    double cold_spot_c = 4.0;   // depression centred on MS-11
    double warm_spot_c = 1.4;   // excess centred on MS-6
    double harmonic_c = 0.4;
    double spot_radius_m = 5.0;

    double globe_excess_c = 6.0;  // t_g - t_a at solar peak
    double wind_day_ms = 0.35;
    double wind_night_ms = 0.05;
    double rh_noon_pct = 60.0;
    double uv_peak = 3.2;
    double cloud_spike_depth = 0.45;  // fractional UV dips from passing clouds

    double noise_c = 0.15;
    double outdoor_offset_c = 3.0;

    /// Throws ConfigError on inconsistent parameters.
    void validate() const;
};

struct DefaultProfiles {
    DayProfile sunny;
    DayProfile cloudy;
};

DefaultProfiles default_profiles();

struct GroundTruth {
    double air_temp = 0.0;           // degC
    double globe_temp = 0.0;         // degC
    double air_velocity = 0.0;       // m/s
    double relative_humidity = 0.0;  // percent
    double uvi = 0.0;                // erythemal index at the query point
    double uv_spectrum_scale = 0.0;  // multiplier on reference_uv_spectrum()
};

/// Smooth clear-sky-like UV spectrum used to express UV truth as a
/// spectrum scale.
const climate::UvSpectrum& reference_uv_spectrum();
double reference_uvi();

class ClimateField {
public:
    /// `days[i]` applies to the UTC day `first_day + i`; times outside the
    /// covered days reuse the nearest profile.
    ClimateField(GreenhouseGeometry geometry, std::vector<DayProfile> days, std::int64_t first_day,
                 std::uint64_t seed);

    /// Single profile for every day.
    ClimateField(GreenhouseGeometry geometry, DayProfile profile, std::uint64_t seed);

    /// Throws DomainError for points outside the greenhouse and away from
    /// any outdoor station.
    GroundTruth sample(double x, double y, double z, UtcSeconds t) const;

    const GreenhouseGeometry& geometry() const { return geometry_; }
    const DayProfile& profile_for(UtcSeconds t) const;

    /// True when the globe excess is non-zero at time t.
    bool daylight(UtcSeconds t) const;

private:
    double anomaly(double x, double y, const DayProfile& p) const;
    double noise(double x, double y, double z, double t, std::uint64_t stream) const;

    GreenhouseGeometry geometry_;
    std::vector<DayProfile> days_;
    std::int64_t first_day_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> anomaly_offset_;  // per day, zero-mean over indoor sites
};

}  // namespace greenmesh::field
