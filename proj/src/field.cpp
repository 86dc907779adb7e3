#include "greenmesh/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "greenmesh/errors.hpp"
#include "greenmesh/rng.hpp"

namespace greenmesh::field {
namespace {

constexpr double kAnkleM = 0.23;
constexpr double kHeadM = 1.56;

// Lattice of the value noise: metres, metres, metres, seconds.
constexpr double kNoiseCellXY = 4.0;
constexpr double kNoiseCellZ = 0.7;
constexpr double kNoiseCellT = 600.0;

double bump(double hour, double center, double half_width) {
    const double u = (hour - center) / half_width;
    if (std::abs(u) >= 1.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * u);
    return c * c;
}

double solar(double hour, const DayProfile& p) {
    if (hour <= p.sunrise_hour || hour >= p.sunset_hour) return 0.0;
    return std::sin(std::numbers::pi * (hour - p.sunrise_hour) / (p.sunset_hour - p.sunrise_hour));
}

// 0 at the daily minimum, 1 at the daily maximum.
double diurnal(double hour, const DayProfile& p) {
    const double rise = p.temp_max_hour - p.temp_min_hour;
    if (hour < p.temp_min_hour) hour += 24.0;
    if (hour <= p.temp_max_hour) {
        return 0.5 * (1.0 - std::cos(std::numbers::pi * (hour - p.temp_min_hour) / rise));
    }
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (hour - p.temp_max_hour) / (24.0 - rise)));
}

double normalized_height(double z) {
    return std::clamp((z - kAnkleM) / (kHeadM - kAnkleM), -0.2, 1.2);
}

double gauss(double x, double y, Point2 c, double radius) {
    const double dx = x - c.x;
    const double dy = y - c.y;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * radius * radius));
}

double smoothstep(double f) { return f * f * (3.0 - 2.0 * f); }

double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::int64_t iz,
                     std::int64_t it) {
    const auto h = derive_seed(seed, {static_cast<std::uint64_t>(ix), static_cast<std::uint64_t>(iy),
                                      static_cast<std::uint64_t>(iz), static_cast<std::uint64_t>(it)});
    return 2.0 * unit_from_bits(h) - 1.0;
}

}  // namespace

const char* to_string(DayType t) { return t == DayType::sunny ? "sunny" : "cloudy"; }

GreenhouseGeometry GreenhouseGeometry::standard() {
    GreenhouseGeometry g;
    const double xs[3] = {7.0, 17.0, 27.0};
    const double ys[4] = {28.0, 20.0, 12.0, 4.0};
    std::uint8_t id = 1;
    for (double y : ys) {
        for (double x : xs) g.stations.push_back({id++, {x, y}, false});
    }
    g.stations.push_back({13, {7.0, 37.0}, true});
    return g;
}

double GreenhouseGeometry::roof_height(double x) const {
    const double half = width_m / 2.0;
    const double frac = std::clamp(1.0 - std::abs(x - half) / half, 0.0, 1.0);
    return eave_height_m + (ridge_height_m - eave_height_m) * frac;
}

bool GreenhouseGeometry::inside(double x, double y, double z) const {
    return x >= 0.0 && x <= width_m && y >= 0.0 && y <= depth_m && z >= 0.0 && z <= roof_height(x);
}

bool GreenhouseGeometry::near_outdoor_station(double x, double y, double z) const {
    if (z < 0.0 || z > 2.5) return false;
    for (const auto& s : stations) {
        if (!s.outdoor) continue;
        const double dx = x - s.position.x;
        const double dy = y - s.position.y;
        if (dx * dx + dy * dy <= outdoor_radius_m * outdoor_radius_m) return true;
    }
    return false;
}

const StationSite& GreenhouseGeometry::station(std::uint8_t id) const {
    for (const auto& s : stations) {
        if (s.id == id) return s;
    }
    throw ConfigError("unknown station MS-" + std::to_string(id));
}

std::vector<std::uint8_t> GreenhouseGeometry::indoor_ids() const {
    std::vector<std::uint8_t> ids;
    for (const auto& s : stations) {
        if (!s.outdoor) ids.push_back(s.id);
    }
    return ids;
}

void GreenhouseGeometry::validate() const {
    if (!(width_m > 0.0 && depth_m > 0.0)) throw ConfigError("greenhouse footprint must be positive");
    if (!(eave_height_m > 0.0 && ridge_height_m >= eave_height_m)) {
        throw ConfigError("greenhouse heights must satisfy 0 < eave <= ridge");
    }
    if (stations.empty()) throw ConfigError("geometry has no stations");
    for (std::size_t i = 0; i < stations.size(); ++i) {
        const auto& s = stations[i];
        if (s.id == 0) throw ConfigError("station id 0 is reserved for the collector");
        for (std::size_t j = 0; j < i; ++j) {
            if (stations[j].id == s.id) throw ConfigError("duplicate station id " + std::to_string(s.id));
        }
        const bool in = s.position.x >= 0.0 && s.position.x <= width_m && s.position.y >= 0.0 &&
                        s.position.y <= depth_m;
        if (s.outdoor == in) {
            throw ConfigError("station MS-" + std::to_string(s.id) +
                              (s.outdoor ? " is marked outdoor but lies inside the footprint"
                                         : " lies outside the footprint"));
        }
    }
}

void DayProfile::validate() const {
    if (!(vertical_gradient_c >= 0.0)) throw ConfigError("vertical gradient must be non-negative");
    if (!(temp_max_c >= temp_min_c)) throw ConfigError("temp_max_c must be >= temp_min_c");
    if (!(temp_min_hour >= 0.0 && temp_max_hour > temp_min_hour && temp_max_hour < 24.0)) {
        throw ConfigError("temperature extremum hours must satisfy 0 <= min < max < 24");
    }
    if (!(sunrise_hour >= 0.0 && sunset_hour > sunrise_hour && sunset_hour <= 24.0)) {
        throw ConfigError("daylight window must satisfy 0 <= sunrise < sunset <= 24");
    }
    if (!(vertical_half_width_h > 0.0 && horizontal_half_width_h > 0.0 && spot_radius_m > 0.0)) {
        throw ConfigError("half widths and spot radius must be positive");
    }
    if (!(horizontal_scale >= 0.0 && globe_excess_c >= 0.0 && uv_peak >= 0.0 && noise_c >= 0.0)) {
        throw ConfigError("scales, globe excess, UV peak and noise must be non-negative");
    }
    if (!(wind_night_ms >= 0.0 && wind_day_ms >= 0.0 && wind_day_ms <= 0.9 && wind_night_ms <= 0.9)) {
        throw ConfigError("wind speeds must lie in [0, 0.9] m/s");
    }
    if (!(rh_noon_pct >= 0.0 && rh_noon_pct <= 100.0)) throw ConfigError("rh_noon_pct outside [0, 100]");
    if (!(cloud_spike_depth >= 0.0 && cloud_spike_depth < 1.0)) {
        throw ConfigError("cloud_spike_depth must lie in [0, 1)");
    }
}

DefaultProfiles default_profiles() {
    DefaultProfiles d;
    d.sunny = DayProfile{};

    DayProfile& c = d.cloudy;
    c.type = DayType::cloudy;
    c.temp_min_c = 8.0;
    c.temp_max_c = 13.8;
    c.vertical_gradient_c = 2.0;
    c.horizontal_scale = 1.0 / 3.0;
    c.globe_excess_c = 1.5;
    c.wind_day_ms = 0.15;
    c.rh_noon_pct = 80.0;
    c.uv_peak = 1.0;
    c.cloud_spike_depth = 0.3;
    c.outdoor_offset_c = 1.5;
    return d;
}

const climate::UvSpectrum& reference_uv_spectrum() {
    static const climate::UvSpectrum spectrum = [] {
        climate::UvSpectrum s;
        for (int nm = 250; nm <= 400; ++nm) {
            s.wavelength_nm.push_back(nm);
            // Ozone cut-off below ~295 nm, exponential rise through UVB,
            // flat UVA plateau.
            double e = 0.0;
            if (nm >= 295) e = nm >= 330 ? 0.5 : 0.5 * std::pow(10.0, (nm - 330.0) / 12.0);
            s.irradiance.push_back(e);
        }
        return s;
    }();
    return spectrum;
}

double reference_uvi() {
    static const double uvi = climate::uvi_from_spectrum(reference_uv_spectrum());
    return uvi;
}

ClimateField::ClimateField(GreenhouseGeometry geometry, std::vector<DayProfile> days,
                           std::int64_t first_day, std::uint64_t seed)
    : geometry_(std::move(geometry)), days_(std::move(days)), first_day_(first_day), seed_(seed) {
    if (days_.empty()) throw ConfigError("climate field needs at least one day profile");
    geometry_.validate();
    for (const auto& p : days_) p.validate();

    const auto indoor = geometry_.indoor_ids();
    if (indoor.empty()) throw ConfigError("climate field needs at least one indoor station");
    anomaly_offset_.reserve(days_.size());
    for (const auto& p : days_) {
        double sum = 0.0;
        for (auto id : indoor) {
            const auto& pos = geometry_.station(id).position;
            sum += anomaly(pos.x, pos.y, p);
        }
        anomaly_offset_.push_back(sum / static_cast<double>(indoor.size()));
    }
}

ClimateField::ClimateField(GreenhouseGeometry geometry, DayProfile profile, std::uint64_t seed)
    : ClimateField(std::move(geometry), std::vector<DayProfile>{profile}, 0, seed) {}

const DayProfile& ClimateField::profile_for(UtcSeconds t) const {
    const auto i = std::clamp<std::int64_t>(day_index(t) - first_day_, 0,
                                            static_cast<std::int64_t>(days_.size()) - 1);
    return days_[static_cast<std::size_t>(i)];
}

bool ClimateField::daylight(UtcSeconds t) const {
    return solar(hour_of_day(t), profile_for(t)) > 0.0;
}

double ClimateField::anomaly(double x, double y, const DayProfile& p) const {
    const auto find = [&](std::uint8_t id, Point2 fallback) {
        for (const auto& s : geometry_.stations) {
            if (s.id == id) return s.position;
        }
        return fallback;
    };
    const Point2 cold = find(11, {17.0, 4.0});
    const Point2 warm = find(6, {27.0, 20.0});
    return -p.cold_spot_c * gauss(x, y, cold, p.spot_radius_m) +
           p.warm_spot_c * gauss(x, y, warm, p.spot_radius_m) +
           p.harmonic_c * std::sin(2.0 * std::numbers::pi * x / geometry_.width_m) *
               std::cos(2.0 * std::numbers::pi * y / geometry_.depth_m);
}

double ClimateField::noise(double x, double y, double z, double t, std::uint64_t stream) const {
    const double coords[4] = {x / kNoiseCellXY, y / kNoiseCellXY, z / kNoiseCellZ, t / kNoiseCellT};
    std::int64_t base[4];
    double frac[4];
    for (int i = 0; i < 4; ++i) {
        const double f = std::floor(coords[i]);
        base[i] = static_cast<std::int64_t>(f);
        frac[i] = smoothstep(coords[i] - f);
    }
    const std::uint64_t seed = derive_seed(seed_, {0x6e6f697365ULL, stream});
    double total = 0.0;
    for (int corner = 0; corner < 16; ++corner) {
        double w = 1.0;
        std::int64_t idx[4];
        for (int i = 0; i < 4; ++i) {
            const int bit = (corner >> i) & 1;
            idx[i] = base[i] + bit;
            w *= bit ? frac[i] : 1.0 - frac[i];
        }
        total += w * lattice_value(seed, idx[0], idx[1], idx[2], idx[3]);
    }
    return total;
}

GroundTruth ClimateField::sample(double x, double y, double z, UtcSeconds t) const {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        throw DomainError("field query coordinates must be finite");
    }
    const bool indoor = geometry_.inside(x, y, z);
    if (!indoor && !geometry_.near_outdoor_station(x, y, z)) {
        throw DomainError("field query point outside the modelled region");
    }
    const auto& p = profile_for(t);
    const auto day = static_cast<std::size_t>(std::clamp<std::int64_t>(
        day_index(t) - first_day_, 0, static_cast<std::int64_t>(days_.size()) - 1));
    const double hour = hour_of_day(t);
    const double tsec = static_cast<double>(t);
    const double zn = normalized_height(z);
    const double sun = solar(hour, p);
    const double warmth = diurnal(hour, p);

    double air = p.temp_min_c + (p.temp_max_c - p.temp_min_c) * warmth;
    double globe_excess = p.globe_excess_c * sun;
    double wind = p.wind_night_ms + (p.wind_day_ms - p.wind_night_ms) * sun * (0.7 + 0.6 * zn);
    double uvi = p.uv_peak * std::pow(sun, 1.3);

    if (indoor) {
        air += p.vertical_gradient_c *
               bump(hour, p.vertical_center_hour, p.vertical_half_width_h) * (zn - 0.5);
        const double horizontal =
            p.horizontal_scale *
            bump(hour, p.vertical_center_hour + p.horizontal_lag_h, p.horizontal_half_width_h);
        air += horizontal * (1.6 - zn) * (anomaly(x, y, p) - anomaly_offset_[day]);
        globe_excess *= 0.8 + 0.4 * zn;
    } else {
        air -= p.outdoor_offset_c;
        globe_excess *= 1.5;
        wind *= 2.5;
        uvi *= 1.6;
    }
    air += p.noise_c * noise(x, y, z, tsec, 0);

    // Passing clouds: dips where a slowly varying noise rises above 0.4.
    if (uvi > 0.0 && p.cloud_spike_depth > 0.0) {
        const double n = noise(0.0, 0.0, 0.0, tsec * 0.5, 3);
        const double dip = std::clamp((n - 0.4) / 0.6, 0.0, 1.0);
        uvi *= 1.0 - p.cloud_spike_depth * dip;
    }

    GroundTruth g;
    g.air_temp = air;
    g.globe_temp = air + globe_excess;
    g.air_velocity = std::clamp(wind + 0.03 * noise(x, y, z, tsec, 1), 0.0, 0.9);
    const double dryness = std::clamp((warmth - 0.3) / 0.7, 0.0, 1.0) * (0.9 + 0.2 * zn);
    g.relative_humidity =
        std::clamp(100.0 - (100.0 - p.rh_noon_pct) * dryness + noise(x, y, z, tsec, 2), 0.0, 100.0);
    g.uvi = uvi;
    g.uv_spectrum_scale = uvi / reference_uvi();
    return g;
}

}  // namespace greenmesh::field
