#include "greenmesh/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <set>
#include <utility>

#include "bundled_scenarios.hpp"
#include "greenmesh/errors.hpp"

namespace greenmesh::scenario {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
        if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_number(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be a boolean");
        out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
        if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
            throw ConfigError(where + "." + key + " must be non-negative");
        }
        out = v.get<T>();
    } else {
        if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
        out = v.get<T>();
    }
}

std::uint8_t read_station_id(const json& v, const std::string& where) {
    if (!v.is_number_unsigned() || v.get<unsigned>() < 1 || v.get<unsigned>() > 254) {
        throw ConfigError(where + " must hold station ids in 1..254");
    }
    return static_cast<std::uint8_t>(v.get<unsigned>());
}

field::DayType parse_day_type(const json& v) {
    if (v == "sunny") return field::DayType::sunny;
    if (v == "cloudy") return field::DayType::cloudy;
    throw ConfigError("day types must be \"sunny\" or \"cloudy\"");
}

using ProfileField = std::pair<const char*, double field::DayProfile::*>;

const std::vector<ProfileField>& profile_fields() {
    using P = field::DayProfile;
    static const std::vector<ProfileField> fields{
        {"temp_min_c", &P::temp_min_c},
        {"temp_max_c", &P::temp_max_c},
        {"temp_min_hour", &P::temp_min_hour},
        {"temp_max_hour", &P::temp_max_hour},
        {"sunrise_hour", &P::sunrise_hour},
        {"sunset_hour", &P::sunset_hour},
        {"vertical_gradient_c", &P::vertical_gradient_c},
        {"vertical_center_hour", &P::vertical_center_hour},
        {"vertical_half_width_h", &P::vertical_half_width_h},
        {"horizontal_scale", &P::horizontal_scale},
        {"horizontal_lag_h", &P::horizontal_lag_h},
        {"horizontal_half_width_h", &P::horizontal_half_width_h},
        {"cold_spot_c", &P::cold_spot_c},
        {"warm_spot_c", &P::warm_spot_c},
        {"harmonic_c", &P::harmonic_c},
        {"spot_radius_m", &P::spot_radius_m},
        {"globe_excess_c", &P::globe_excess_c},
        {"wind_day_ms", &P::wind_day_ms},
        {"wind_night_ms", &P::wind_night_ms},
        {"rh_noon_pct", &P::rh_noon_pct},
        {"uv_peak", &P::uv_peak},
        {"cloud_spike_depth", &P::cloud_spike_depth},
        {"noise_c", &P::noise_c},
        {"outdoor_offset_c", &P::outdoor_offset_c},
    };
    return fields;
}

void apply_profile(const json& obj, field::DayProfile& p, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        const auto& fields = profile_fields();
        const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return key == f.first; });
        if (it == fields.end()) throw ConfigError("unknown key '" + key + "' in " + where);
        if (!value.is_number()) throw ConfigError(where + "." + key + " must be a number");
        p.*(it->second) = value.get<double>();
    }
}

Scenario from_json(const json& doc) {
    check_keys(doc, {"name", "seed", "start_date", "days", "profiles", "geometry", "stations", "sensors",
                     "schedule", "radio", "plants", "analysis", "description"},
               "scenario");
    Scenario s;
    if (!doc.contains("name") || !doc.at("name").is_string()) throw ConfigError("scenario.name is required");
    s.name = doc.at("name").get<std::string>();
    if (!doc.contains("seed")) throw ConfigError("scenario.seed is required");
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("scenario.seed must be a non-negative integer");
    s.seed = doc.at("seed").get<std::uint64_t>();

    s.start_day = parse_date(doc.value("start_date", std::string("2017-01-22")));
    if (!doc.contains("days") || !doc.at("days").is_array()) throw ConfigError("scenario.days is required");
    for (const auto& d : doc.at("days")) s.days.push_back(parse_day_type(d));

    if (doc.contains("profiles")) {
        const auto& p = doc.at("profiles");
        check_keys(p, {"sunny", "cloudy"}, "profiles");
        if (p.contains("sunny")) apply_profile(p.at("sunny"), s.profiles.sunny, "profiles.sunny");
        if (p.contains("cloudy")) apply_profile(p.at("cloudy"), s.profiles.cloudy, "profiles.cloudy");
    }

    if (doc.contains("geometry")) {
        const auto& g = doc.at("geometry");
        check_keys(g, {"collector"}, "geometry");
        if (g.contains("collector")) {
            const auto& c = g.at("collector");
            if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
                throw ConfigError("geometry.collector must be [x, y]");
            }
            s.geometry.collector = {c[0].get<double>(), c[1].get<double>()};
        }
    }

    if (doc.contains("stations")) {
        const auto& st = doc.at("stations");
        if (!st.is_array()) throw ConfigError("scenario.stations must be a list of ids");
        for (const auto& v : st) s.stations.push_back(read_station_id(v, "scenario.stations"));
    } else {
        for (const auto& site : s.geometry.stations) s.stations.push_back(site.id);
    }

    if (doc.contains("sensors")) {
        const auto& o = doc.at("sensors");
        check_keys(o, {"noise", "offsets"}, "sensors");
        bool noise = true;
        read_number(o, "noise", noise, "sensors");
        read_number(o, "offsets", s.sensors.systematic_offsets, "sensors");
        for (auto* spec : {&s.sensors.air_temp, &s.sensors.globe_temp, &s.sensors.air_velocity,
                           &s.sensors.relative_humidity, &s.sensors.uv}) {
            spec->noise_enabled = noise;
        }
    }

    if (doc.contains("schedule")) {
        const auto& o = doc.at("schedule");
        check_keys(o, {"trigger_period_s", "settle_delay_s", "retries", "poll_timeout_ms", "hop_latency_ms",
                       "trigger_repeats"},
                   "schedule");
        read_number(o, "trigger_period_s", s.schedule.trigger_period_s, "schedule");
        read_number(o, "settle_delay_s", s.schedule.settle_delay_s, "schedule");
        read_number(o, "retries", s.schedule.retries, "schedule");
        read_number(o, "poll_timeout_ms", s.schedule.poll_timeout_ms, "schedule");
        read_number(o, "hop_latency_ms", s.schedule.hop_latency_ms, "schedule");
        read_number(o, "trigger_repeats", s.schedule.trigger_repeats, "schedule");
    }

    if (doc.contains("radio")) {
        const auto& o = doc.at("radio");
        check_keys(o, {"tx_power_dbm", "sensitivity_dbm", "reference_loss_db", "path_loss_exponent",
                       "foliage_db_per_m2", "row_crossing_x", "row_crossing_y", "fixed_probability",
                       "relocated", "delivery_map", "reconfig"},
                   "radio");
        auto& l = s.link;
        read_number(o, "tx_power_dbm", l.tx_power_dbm, "radio");
        read_number(o, "sensitivity_dbm", l.sensitivity_dbm, "radio");
        read_number(o, "reference_loss_db", l.reference_loss_db, "radio");
        read_number(o, "path_loss_exponent", l.path_loss_exponent, "radio");
        read_number(o, "foliage_db_per_m2", l.foliage_db_per_m2, "radio");
        read_number(o, "row_crossing_x", l.row_crossing_x, "radio");
        read_number(o, "row_crossing_y", l.row_crossing_y, "radio");
        if (o.contains("fixed_probability") && !o.at("fixed_probability").is_null()) {
            double p = 0.0;
            read_number(o, "fixed_probability", p, "radio");
            l.fixed_probability = p;
        }
        if (o.contains("relocated")) {
            if (!o.at("relocated").is_array()) throw ConfigError("radio.relocated must be a list of ids");
            for (const auto& v : o.at("relocated")) l.relocated.push_back(read_station_id(v, "radio.relocated"));
        }
        if (o.contains("delivery_map")) {
            const auto& m = o.at("delivery_map");
            check_keys(m, {"midpoint_db", "slope_db", "floor_db", "ceiling_db"}, "radio.delivery_map");
            read_number(m, "midpoint_db", l.map.midpoint_db, "radio.delivery_map");
            read_number(m, "slope_db", l.map.slope_db, "radio.delivery_map");
            read_number(m, "floor_db", l.map.floor_db, "radio.delivery_map");
            read_number(m, "ceiling_db", l.map.ceiling_db, "radio.delivery_map");
        }
        if (o.contains("reconfig")) {
            const auto& r = o.at("reconfig");
            check_keys(r, {"window", "threshold", "enabled"}, "radio.reconfig");
            read_number(r, "window", s.reconfig.window, "radio.reconfig");
            read_number(r, "threshold", s.reconfig.threshold, "radio.reconfig");
            read_number(r, "enabled", s.reconfig.enabled, "radio.reconfig");
        }
    }

    s.plants.start = s.start_time();
    s.plants.final_height_m = 0.0;  // no crop unless configured
    s.plants.initial_height_m = 0.0;
    if (doc.contains("plants")) {
        const auto& o = doc.at("plants");
        check_keys(o, {"start_date", "initial_height_m", "final_height_m", "growth_days"}, "plants");
        s.plants.final_height_m = radio::PlantGrowth{}.final_height_m;
        if (o.contains("start_date")) {
            if (!o.at("start_date").is_string()) throw ConfigError("plants.start_date must be a date string");
            s.plants.start = day_start(parse_date(o.at("start_date").get<std::string>()));
        }
        read_number(o, "initial_height_m", s.plants.initial_height_m, "plants");
        read_number(o, "final_height_m", s.plants.final_height_m, "plants");
        read_number(o, "growth_days", s.plants.growth_days, "plants");
    }

    if (doc.contains("analysis")) {
        const auto& o = doc.at("analysis");
        check_keys(o, {"debounce_s", "wind_calibrated", "wind_calibration"}, "analysis");
        read_number(o, "debounce_s", s.analysis.debounce_s, "analysis");
        read_number(o, "wind_calibrated", s.analysis.wind_calibrated, "analysis");
        if (o.contains("wind_calibration")) {
            const auto& pts = o.at("wind_calibration");
            if (!pts.is_array()) throw ConfigError("analysis.wind_calibration must be a list of [volts, m/s]");
            s.analysis.wind_calibration.points.clear();
            for (const auto& p : pts) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                    throw ConfigError("analysis.wind_calibration must be a list of [volts, m/s]");
                }
                s.analysis.wind_calibration.points.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
        }
        s.analysis.wind_calibration.calibrated = s.analysis.wind_calibrated;
    }
    return s;
}

}  // namespace

std::vector<field::DayProfile> Scenario::day_profiles() const {
    std::vector<field::DayProfile> out;
    for (const auto d : days) out.push_back(d == field::DayType::sunny ? profiles.sunny : profiles.cloudy);
    return out;
}

void Scenario::validate() const {
    if (name.empty()) throw ConfigError("scenario name must not be empty");
    if (days.empty()) throw ConfigError("scenario needs at least one day");
    profiles.sunny.validate();
    profiles.cloudy.validate();
    geometry.validate();
    if (stations.empty()) throw ConfigError("scenario needs at least one station");
    std::set<std::uint8_t> seen;
    for (const auto id : stations) {
        if (!seen.insert(id).second) throw ConfigError("duplicate station id " + std::to_string(id));
        geometry.station(id);  // throws for unknown ids
    }
    for (const auto id : link.relocated) {
        if (!seen.contains(id)) throw ConfigError("relocated antenna on unknown station " + std::to_string(id));
    }
    for (const auto* spec : {&sensors.air_temp, &sensors.globe_temp, &sensors.air_velocity,
                             &sensors.relative_humidity, &sensors.uv}) {
        spec->validate();
    }
    schedule.validate(stations.size());
    link.validate();
    plants.validate();
    if (reconfig.window < 1) throw ConfigError("reconfiguration window must be >= 1");
    if (!(reconfig.threshold > 0.0 && reconfig.threshold < 1.0)) {
        throw ConfigError("reconfiguration threshold must lie in (0, 1)");
    }
    if (analysis.debounce_s < 0) throw ConfigError("analysis debounce must be >= 0");
    analysis.wind_calibration.validate();
}

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    Scenario s;
    try {
        s = from_json(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario has an invalid value: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return s;
}

std::vector<std::string> bundled_scenario_names() {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < detail::kBundledCount; ++i) out.emplace_back(detail::kBundled[i].name);
    return out;
}

std::optional<std::string> bundled_scenario_text(const std::string& name) {
    for (std::size_t i = 0; i < detail::kBundledCount; ++i) {
        if (name == detail::kBundled[i].name) return std::string(detail::kBundled[i].text);
    }
    return std::nullopt;
}

Scenario load_scenario(const std::string& name_or_path) {
    if (const auto text = bundled_scenario_text(name_or_path)) return parse_scenario(*text);
    std::ifstream in(name_or_path, std::ios::binary);
    if (!in) throw StorageError("cannot read scenario file " + name_or_path);
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_scenario(text);
}

}  // namespace greenmesh::scenario
