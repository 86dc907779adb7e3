#include "greenmesh/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "greenmesh/errors.hpp"
#include "greenmesh/field.hpp"
#include "greenmesh/store.hpp"
#include "greenmesh/utc.hpp"

namespace greenmesh::analysis {
namespace {

using heterogeneity::Axis;
using heterogeneity::ParameterKind;
using nlohmann::json;

constexpr std::array<Axis, 2> kAxes{Axis::vertical, Axis::horizontal};

std::string fmt(double v, int decimals = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path.string());
    return out;
}

std::string join_ids(const std::vector<std::uint8_t>& ids) {
    std::string s;
    for (const auto id : ids) {
        if (!s.empty()) s += ';';
        s += std::to_string(id);
    }
    return s;
}

}  // namespace

std::vector<std::uint8_t> StoreContext::indoor_ids() const {
    std::vector<std::uint8_t> ids;
    for (const auto& s : stations) {
        if (!s.outdoor) ids.push_back(s.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string StoreContext::to_json() const {
    json st = json::array();
    for (const auto& s : stations) st.push_back({{"id", s.id}, {"outdoor", s.outdoor}});
    json pts = json::array();
    for (const auto& [v, ms] : wind_calibration.points) pts.push_back({v, ms});
    const json doc{{"scenario", scenario},
                   {"stations", st},
                   {"debounce_s", debounce_s},
                   {"wind_calibration", {{"calibrated", wind_calibration.calibrated}, {"points", pts}}}};
    return doc.dump(2) + "\n";
}

StoreContext StoreContext::from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        StoreContext ctx;
        ctx.scenario = doc.at("scenario").get<std::string>();
        for (const auto& s : doc.at("stations")) {
            ctx.stations.push_back({s.at("id").get<std::uint8_t>(), s.at("outdoor").get<bool>()});
        }
        ctx.debounce_s = doc.at("debounce_s").get<std::int64_t>();
        const auto& w = doc.at("wind_calibration");
        ctx.wind_calibration.calibrated = w.at("calibrated").get<bool>();
        ctx.wind_calibration.points.clear();
        for (const auto& p : w.at("points")) ctx.wind_calibration.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        ctx.wind_calibration.validate();
        return ctx;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed store.json: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("malformed store.json: ") + e.what());
    }
}

void write_store_context(const fs::path& root, const StoreContext& ctx) {
    std::error_code ec;
    fs::create_directories(root, ec);
    auto out = open_out(root / "store.json");
    out << ctx.to_json();
}

StoreContext read_store_context(const fs::path& root) {
    const auto path = root / "store.json";
    if (!fs::exists(path)) {
        StoreContext ctx;
        ctx.scenario = "unknown";
        for (const auto& s : field::GreenhouseGeometry::standard().stations) ctx.stations.push_back({s.id, s.outdoor});
        return ctx;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + path.string());
    return StoreContext::from_json({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

std::optional<HeightValues> height_values(const record::MeasurementRecord& r, std::size_t height,
                                          const station::CalibrationCurve& wind) {
    if (r.missing() || height > 2) return std::nullopt;
    HeightValues v;
    v.air_temp = record::from_milli(r.readings[record::reading_index(height, 0)]);
    v.globe_temp = record::from_milli(r.readings[record::reading_index(height, 1)]);
    v.wind_volts = record::from_milli(r.readings[record::reading_index(height, 2)]);
    v.relative_humidity = record::from_milli(r.readings[record::reading_index(height, 3)]);
    try {
        const auto cal = station::wind_calibration(v.wind_volts, wind);
        v.air_velocity = cal.value;
        v.velocity_clamped = cal.clamped;
        v.vapour_pressure = climate::partial_vapour_pressure(v.air_temp, v.relative_humidity);
        if (wind.calibrated) {
            const auto tr = climate::mean_radiant_temp({v.air_temp, v.globe_temp, v.air_velocity, v.relative_humidity});
            v.mean_radiant_temp = tr.mean_radiant_temp;
            v.regime = tr.regime;
        } else {
            v.mean_radiant_temp = climate::mean_radiant_natural(v.globe_temp, v.air_temp);
            v.regime = climate::ConvectionRegime::natural;
        }
    } catch (const DomainError&) {
        return std::nullopt;
    }
    return v;
}

const std::vector<heterogeneity::Interval>& DayReport::intervals_for(ParameterKind kind, Axis axis) const {
    static const std::vector<heterogeneity::Interval> none;
    const auto it = intervals.find({kind, axis});
    return it == intervals.end() ? none : it->second;
}

std::vector<heterogeneity::Snapshot> day_snapshots(const fs::path& root, std::int64_t day, const StoreContext& ctx,
                                                   std::size_t* natural, std::size_t* forced) {
    std::map<std::int64_t, heterogeneity::Snapshot> by_time;
    for (const auto id : ctx.indoor_ids()) {
        for (const auto& r : store::read_records(root, day, id)) {
            auto& snap = by_time[static_cast<std::int64_t>(r.timestamp)];
            snap.timestamp = static_cast<std::int64_t>(r.timestamp);
            heterogeneity::StationSnapshot s;
            s.station = id;
            for (std::size_t h = 0; h < 3; ++h) {
                const auto v = height_values(r, h, ctx.wind_calibration);
                if (!v) continue;
                s.heights[h] = climate::BasicParameters{v->air_temp, v->mean_radiant_temp, v->air_velocity,
                                                        v->vapour_pressure};
                if (v->regime == climate::ConvectionRegime::natural) {
                    if (natural) ++*natural;
                } else if (forced) {
                    ++*forced;
                }
            }
            snap.stations.push_back(s);
        }
    }
    std::vector<heterogeneity::Snapshot> out;
    out.reserve(by_time.size());
    for (auto& [t, snap] : by_time) out.push_back(std::move(snap));
    return out;
}

Report analyze(const fs::path& root, const AnalysisOptions& options) {
    const auto days = store::list_closed_days(root);
    if (days.empty()) throw NotReadyError("no closed day under " + root.string());
    const auto ctx = read_store_context(root);
    if (options.kinds.empty()) throw ConfigError("no parameter kinds requested");

    Report report;
    report.scenario = ctx.scenario;
    report.wind_calibrated = ctx.wind_calibration.calibrated;
    report.debounce_s = options.debounce_s.value_or(ctx.debounce_s);
    report.kinds = options.kinds;
    for (const auto day : days) {
        DayReport dr;
        dr.day = day;
        const auto snaps = day_snapshots(root, day, ctx, &dr.natural_regime, &dr.forced_regime);
        dr.snapshots = snaps.size();
        for (const auto kind : options.kinds) {
            for (const auto axis : kAxes) dr.verdicts[{kind, axis}];
        }
        for (const auto& snap : snaps) {
            if (!heterogeneity::has_data(snap)) {
                ++dr.empty_snapshots;
                continue;
            }
            for (const auto kind : options.kinds) {
                for (const auto axis : kAxes) {
                    try {
                        dr.verdicts[{kind, axis}].push_back(heterogeneity::assess(snap, kind, axis));
                    } catch (const DomainError&) {
                        // nothing assessable on this axis
                    }
                }
            }
        }
        for (const auto& [key, series] : dr.verdicts) {
            dr.intervals[key] = heterogeneity::heterogeneity_intervals(series, report.debounce_s);
        }
        report.days.push_back(std::move(dr));
    }
    return report;
}

std::string Report::to_json() const {
    json days_json = json::array();
    for (const auto& d : days) {
        json series = json::array();
        for (const auto& [key, verdicts] : d.verdicts) {
            std::size_t het = 0;
            std::size_t na = 0;
            for (const auto& v : verdicts) {
                if (v.heterogeneous()) ++het;
                if (v.classification == heterogeneity::Classification::not_applicable) ++na;
            }
            json iv = json::array();
            for (const auto& i : d.intervals.at(key)) {
                iv.push_back({{"start_utc", datetime_string(i.start)},
                              {"end_utc", datetime_string(i.end)},
                              {"duration_s", i.duration()}});
            }
            series.push_back({{"parameter", heterogeneity::to_string(key.first)},
                              {"axis", heterogeneity::to_string(key.second)},
                              {"verdicts", verdicts.size()},
                              {"heterogeneous", het},
                              {"not_applicable", na},
                              {"intervals", iv}});
        }
        days_json.push_back({{"date", date_string(d.day)},
                             {"snapshots", d.snapshots},
                             {"empty_snapshots", d.empty_snapshots},
                             {"regimes", {{"natural", d.natural_regime}, {"forced", d.forced_regime}}},
                             {"series", series}});
    }
    json kinds_json = json::array();
    for (const auto k : kinds) kinds_json.push_back(heterogeneity::to_string(k));
    const json doc{{"scenario", scenario},
                   {"wind_calibrated", wind_calibrated},
                   {"radiant_temperature", wind_calibrated ? "regime-selected" : "natural-convection estimate"},
                   {"debounce_s", debounce_s},
                   {"parameters", kinds_json},
                   {"days", days_json}};
    return doc.dump(2) + "\n";
}

void write_report(const Report& report, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw StorageError("cannot create " + out_dir.string() + ": " + ec.message());

    auto verdicts = open_out(out_dir / "verdicts.csv");
    verdicts << "datetime_utc,parameter,axis,classification,mean,limit,offenders,excluded\n";
    auto intervals = open_out(out_dir / "intervals.csv");
    intervals << "date,parameter,axis,start_utc,end_utc,duration_s\n";
    auto planes = open_out(out_dir / "planes.csv");
    planes << "datetime_utc,parameter,mean,limit,ankle,abdomen,head\n";
    auto stations = open_out(out_dir / "stations.csv");

    std::vector<std::uint8_t> station_ids;
    for (const auto& d : report.days) {
        for (const auto& [key, series] : d.verdicts) {
            for (const auto& v : series) {
                for (const auto& lv : v.values) {
                    if (key.second == Axis::horizontal) station_ids.push_back(lv.location);
                }
                for (const auto id : v.excluded) {
                    if (key.second == Axis::horizontal) station_ids.push_back(id);
                }
            }
        }
    }
    std::sort(station_ids.begin(), station_ids.end());
    station_ids.erase(std::unique(station_ids.begin(), station_ids.end()), station_ids.end());
    stations << "datetime_utc,parameter,mean,limit";
    for (const auto id : station_ids) stations << ",MS" << unsigned{id};
    stations << "\n";

    for (const auto& d : report.days) {
        for (const auto& [key, series] : d.verdicts) {
            const char* param = heterogeneity::to_string(key.first);
            for (const auto& v : series) {
                const auto when = datetime_string(v.timestamp);
                const std::string limit = v.limit ? fmt(*v.limit) : "";
                std::vector<std::uint8_t> offenders;
                for (const auto& o : v.offenders) offenders.push_back(o.location);
                verdicts << when << ',' << param << ',' << heterogeneity::to_string(key.second) << ','
                         << heterogeneity::to_string(v.classification) << ',' << fmt(v.mean) << ',' << limit << ','
                         << join_ids(offenders) << ',' << join_ids(v.excluded) << '\n';
                if (key.second == Axis::vertical) {
                    std::array<std::string, 3> cells;
                    for (const auto& lv : v.values) {
                        if (lv.location < 3) cells[lv.location] = fmt(lv.value);
                    }
                    planes << when << ',' << param << ',' << fmt(v.mean) << ',' << limit << ',' << cells[0] << ','
                           << cells[1] << ',' << cells[2] << '\n';
                } else {
                    stations << when << ',' << param << ',' << fmt(v.mean) << ',' << limit;
                    for (const auto id : station_ids) {
                        stations << ',';
                        for (const auto& lv : v.values) {
                            if (lv.location == id) stations << fmt(lv.value);
                        }
                    }
                    stations << '\n';
                }
            }
        }
        for (const auto& [key, list] : d.intervals) {
            for (const auto& i : list) {
                intervals << date_string(d.day) << ',' << heterogeneity::to_string(key.first) << ','
                          << heterogeneity::to_string(key.second) << ',' << datetime_string(i.start) << ','
                          << datetime_string(i.end) << ',' << i.duration() << '\n';
            }
        }
    }
    for (auto* f : {&verdicts, &intervals, &planes, &stations}) {
        f->flush();
        if (!*f) throw StorageError("write failed under " + out_dir.string());
    }
    auto json_out = open_out(out_dir / "report.json");
    json_out << report.to_json();
}

std::vector<EnvelopeRow> radiant_envelope(const fs::path& root, std::uint8_t station, std::int64_t day) {
    std::vector<EnvelopeRow> rows;
    for (const auto& r : store::read_records(root, day, station)) {
        if (r.missing()) continue;
        EnvelopeRow row;
        row.timestamp = static_cast<std::int64_t>(r.timestamp);
        std::array<double, 3> ta{};
        std::array<double, 3> tg{};
        std::array<double, 3> nat{};
        std::array<std::array<double, kEnvelopeVelocities.size()>, 3> frc{};
        bool ok = true;
        for (std::size_t h = 0; h < 3 && ok; ++h) {
            ta[h] = record::from_milli(r.readings[record::reading_index(h, 0)]);
            tg[h] = record::from_milli(r.readings[record::reading_index(h, 1)]);
            try {
                nat[h] = climate::mean_radiant_natural(tg[h], ta[h]);
                for (std::size_t i = 0; i < kEnvelopeVelocities.size(); ++i) {
                    frc[h][i] = climate::mean_radiant_forced(tg[h], ta[h], kEnvelopeVelocities[i]);
                }
            } catch (const DomainError&) {
                ok = false;
            }
        }
        if (!ok) continue;
        row.air_temp = heterogeneity::weighted_vertical_mean(ta[0], ta[1], ta[2]);
        row.globe_temp = heterogeneity::weighted_vertical_mean(tg[0], tg[1], tg[2]);
        row.natural = heterogeneity::weighted_vertical_mean(nat[0], nat[1], nat[2]);
        for (std::size_t i = 0; i < kEnvelopeVelocities.size(); ++i) {
            row.forced[i] = heterogeneity::weighted_vertical_mean(frc[0][i], frc[1][i], frc[2][i]);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_envelope_csv(const std::vector<EnvelopeRow>& rows, std::ostream& out) {
    out << "datetime_utc,t_a,t_g,t_r_natural";
    for (const auto v : kEnvelopeVelocities) out << ",t_r_forced_" << fmt(v, 1);
    out << '\n';
    for (const auto& r : rows) {
        out << datetime_string(r.timestamp) << ',' << fmt(r.air_temp) << ',' << fmt(r.globe_temp) << ','
            << fmt(r.natural);
        for (const auto f : r.forced) out << ',' << fmt(f);
        out << '\n';
    }
}

void export_csv(const fs::path& root, std::ostream& out) {
    const auto ctx = read_store_context(root);
    static const char* heights[3] = {"ankle", "abdomen", "head"};
    out << "datetime_utc,station,height,t_a,t_g,v_a_volts,v_a_calibrated,RH,P_a,t_r,regime,UVI,rssi,hops,missing\n";
    for (const auto day : store::list_days(root)) {
        std::vector<std::uint8_t> ids;
        for (const auto& s : ctx.stations) ids.push_back(s.id);
        std::sort(ids.begin(), ids.end());
        for (const auto id : ids) {
            for (const auto& r : store::read_records(root, day, id)) {
                const auto when = datetime_string(static_cast<UtcSeconds>(r.timestamp));
                for (std::size_t h = 0; h < 3; ++h) {
                    out << when << ',' << unsigned{id} << ',' << heights[h] << ',';
                    const auto v = height_values(r, h, ctx.wind_calibration);
                    if (!v) {
                        out << ",,,,,,,,,,,1\n";
                        continue;
                    }
                    out << fmt(v->air_temp) << ',' << fmt(v->globe_temp) << ',' << fmt(v->wind_volts) << ','
                        << fmt(v->air_velocity) << ',' << fmt(v->relative_humidity) << ',' << fmt(v->vapour_pressure, 4)
                        << ',' << fmt(v->mean_radiant_temp) << ',' << climate::to_string(v->regime) << ','
                        << fmt(r.uvi_centi / 100.0, 2) << ',' << fmt(r.rssi_deci / 10.0, 1) << ','
                        << unsigned{r.hops} << ",0\n";
                }
            }
        }
    }
}

}  // namespace greenmesh::analysis
