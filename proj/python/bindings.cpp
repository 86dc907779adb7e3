#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "greenmesh/analysis.hpp"
#include "greenmesh/climate.hpp"
#include "greenmesh/engine.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/heterogeneity.hpp"
#include "greenmesh/radio.hpp"
#include "greenmesh/scenario.hpp"
#include "greenmesh/store.hpp"
#include "greenmesh/utc.hpp"

namespace py = pybind11;
using namespace greenmesh;

namespace {

using Heights = std::array<std::optional<std::array<double, 4>>, 3>;

heterogeneity::Snapshot to_snapshot(const std::map<std::uint8_t, Heights>& stations, std::int64_t timestamp) {
    heterogeneity::Snapshot snap;
    snap.timestamp = timestamp;
    for (const auto& [id, heights] : stations) {
        heterogeneity::StationSnapshot s;
        s.station = id;
        for (std::size_t h = 0; h < 3; ++h) {
            if (heights[h]) {
                const auto& v = *heights[h];
                s.heights[h] = climate::BasicParameters{v[0], v[1], v[2], v[3]};
            }
        }
        snap.stations.push_back(s);
    }
    return snap;
}

py::dict verdict_dict(const heterogeneity::HomogeneityVerdict& v) {
    py::dict d;
    d["classification"] = heterogeneity::to_string(v.classification);
    d["mean"] = v.mean;
    d["limit"] = v.limit;
    std::vector<std::pair<int, double>> values;
    std::vector<std::pair<int, double>> offenders;
    for (const auto& lv : v.values) values.emplace_back(lv.location, lv.value);
    for (const auto& lv : v.offenders) offenders.emplace_back(lv.location, lv.value);
    d["values"] = values;
    d["offenders"] = offenders;
    d["excluded"] = std::vector<int>(v.excluded.begin(), v.excluded.end());
    return d;
}

std::vector<heterogeneity::ParameterKind> kinds_of(const std::vector<std::string>& names) {
    std::vector<heterogeneity::ParameterKind> out;
    for (const auto& n : names) out.push_back(heterogeneity::parse_kind(n));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of greenmesh";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<StorageError>(m, "StorageError", PyExc_OSError);
    py::register_exception<NotReadyError>(m, "NotReadyError", PyExc_RuntimeError);
    py::register_exception<RoutingError>(m, "RoutingError", PyExc_RuntimeError);

    m.def("hcg_natural", [](double tg, double ta) { return climate::hcg_natural(tg, ta); }, py::arg("globe_temp"),
          py::arg("air_temp"));
    m.def("hcg_forced", [](double v) { return climate::hcg_forced(v); }, py::arg("air_velocity"));
    m.def("mean_radiant_natural", &climate::mean_radiant_natural, py::arg("globe_temp"), py::arg("air_temp"));
    m.def("mean_radiant_forced", &climate::mean_radiant_forced, py::arg("globe_temp"), py::arg("air_temp"),
          py::arg("air_velocity"));
    m.def(
        "mean_radiant_temp",
        [](double ta, double tg, double v, double rh) {
            const auto r = climate::mean_radiant_temp({ta, tg, v, rh});
            return py::make_tuple(r.mean_radiant_temp, climate::to_string(r.regime));
        },
        py::arg("air_temp"), py::arg("globe_temp"), py::arg("air_velocity"), py::arg("relative_humidity") = 50.0,
        "Returns (t_r, regime).");
    m.def("partial_vapour_pressure", &climate::partial_vapour_pressure, py::arg("air_temp"),
          py::arg("relative_humidity"));
    m.def(
        "uvi_from_spectrum",
        [](std::vector<double> wavelength_nm, std::vector<double> irradiance) {
            return climate::uvi_from_spectrum({std::move(wavelength_nm), std::move(irradiance)});
        },
        py::arg("wavelength_nm"), py::arg("irradiance"));
    m.def("classify_uvi", [](double uvi) { return climate::to_string(climate::classify_uvi(uvi)); });

    m.def("weighted_vertical_mean", &heterogeneity::weighted_vertical_mean);
    m.def(
        "homogeneity_limit",
        [](const std::string& kind, double mean) { return heterogeneity::homogeneity_limit(heterogeneity::parse_kind(kind), mean); },
        py::arg("kind"), py::arg("mean"));
    m.def(
        "assess",
        [](const std::map<std::uint8_t, Heights>& stations, const std::string& kind, const std::string& axis,
           std::int64_t timestamp) {
            if (axis != "vertical" && axis != "horizontal") throw ConfigError("unknown axis " + axis);
            const auto ax = axis == "vertical" ? heterogeneity::Axis::vertical : heterogeneity::Axis::horizontal;
            return verdict_dict(heterogeneity::assess(to_snapshot(stations, timestamp), heterogeneity::parse_kind(kind), ax));
        },
        py::arg("stations"), py::arg("kind"), py::arg("axis"), py::arg("timestamp") = 0,
        "stations maps id to three heights, each None or [t_a, t_r, v_a, P_a].");

    m.def(
        "routing_tree",
        [](const std::vector<std::vector<double>>& p) {
            std::vector<std::uint8_t> nodes;
            for (std::size_t i = 0; i < p.size(); ++i) nodes.push_back(static_cast<std::uint8_t>(i));
            radio::LinkTable table(nodes);
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (p[i].size() != p.size()) throw ConfigError("link matrix must be square");
                for (std::size_t j = i + 1; j < p.size(); ++j) {
                    table.set(static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j), p[i][j]);
                }
            }
            const auto tree = radio::compute_routing_tree(table);
            const double bottleneck = tree.parent.empty() ? 1.0 : radio::tree_bottleneck(tree, table);
            return py::make_tuple(tree.parent, tree.unreachable, bottleneck);
        },
        py::arg("probabilities"), "Returns (parent map, unreachable ids, bottleneck); node 0 is the collector.");

    m.def("bundled_scenarios", &scenario::bundled_scenario_names);
    m.def(
        "validate_scenario",
        [](const std::string& name_or_path) {
            const auto sc = scenario::load_scenario(name_or_path);
            py::dict d;
            d["name"] = sc.name;
            d["seed"] = sc.seed;
            d["days"] = sc.days.size();
            d["start_date"] = date_string(sc.start_day);
            d["stations"] = std::vector<int>(sc.stations.begin(), sc.stations.end());
            return d;
        },
        py::arg("scenario"));
    m.def(
        "simulate",
        [](const std::string& name_or_path, const std::filesystem::path& out, std::optional<std::uint64_t> seed) {
            auto sc = scenario::load_scenario(name_or_path);
            if (seed) sc.seed = *seed;
            py::gil_scoped_release release;
            return engine::run(sc, {out, true}).to_json();
        },
        py::arg("scenario"), py::arg("out"), py::arg("seed") = py::none(), "Runs a scenario; returns summary JSON.");
    m.def(
        "analyze",
        [](const std::filesystem::path& store, const std::vector<std::string>& params,
           std::optional<std::filesystem::path> out, std::optional<std::int64_t> debounce) {
            analysis::AnalysisOptions options;
            options.kinds = kinds_of(params);
            options.debounce_s = debounce;
            py::gil_scoped_release release;
            const auto report = analysis::analyze(store, options);
            if (out) analysis::write_report(report, *out);
            return report.to_json();
        },
        py::arg("store"), py::arg("params") = std::vector<std::string>{"air_temp", "mean_radiant_temp"},
        py::arg("out") = py::none(), py::arg("debounce") = py::none(), "Returns report JSON.");
    m.def(
        "export_csv",
        [](const std::filesystem::path& store) {
            std::ostringstream os;
            analysis::export_csv(store, os);
            return os.str();
        },
        py::arg("store"));
    m.def(
        "verify",
        [](const std::filesystem::path& store) {
            std::vector<std::pair<std::string, std::vector<std::string>>> out;
            for (const auto day : store::list_days(store)) {
                const auto r = store::verify_day(store, day);
                out.emplace_back(date_string(day), r.problems);
            }
            return out;
        },
        py::arg("store"), "Per stored day: (date, problems); an empty list means the day verified.");
}
