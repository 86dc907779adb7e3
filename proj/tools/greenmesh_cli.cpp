// greenmesh: simulate, analyze and export greenhouse sensor-network runs.
//
// Exit status: 0 success, 1 configuration error, 2 I/O or storage error,
// 3 analysis precondition not met.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "greenmesh/analysis.hpp"
#include "greenmesh/engine.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/scenario.hpp"
#include "greenmesh/store.hpp"
#include "greenmesh/utc.hpp"

namespace fs = std::filesystem;
using namespace greenmesh;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitPrecondition = 3;

std::vector<heterogeneity::ParameterKind> parse_kinds(const std::string& list) {
    std::vector<heterogeneity::ParameterKind> kinds;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        kinds.push_back(heterogeneity::parse_kind(item));
    }
    if (kinds.empty()) throw ConfigError("--params needs at least one parameter kind");
    return kinds;
}

void require_store(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw StorageError("store directory " + dir.string() + " does not exist");
}

/// Writes to `path`, or stdout when empty.
template <typename F>
void with_output(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path);
    write(out);
    if (!out) throw StorageError("write failed for " + path);
}

int cmd_validate(const std::string& scenario_arg) {
    const auto sc = scenario::load_scenario(scenario_arg);
    std::cout << "ok: " << sc.name << ", " << sc.days.size() << " day(s) from " << date_string(sc.start_day)
              << ", " << sc.stations.size() << " stations, seed " << sc.seed << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_arg, const std::string& out, std::optional<std::uint64_t> seed) {
    auto sc = scenario::load_scenario(scenario_arg);
    if (seed) sc.seed = *seed;
    sc.validate();
    const fs::path root(out);
    if (fs::exists(root / "data") && !fs::is_empty(root / "data")) {
        throw StorageError("output directory " + out + " already holds a store");
    }
    const auto summary = engine::run(sc, {root, true});
    std::cout << sc.name << ": " << summary.days << " day(s), " << summary.rounds << " rounds, "
              << summary.delivered() << " delivered, " << summary.missing() << " missing, "
              << summary.reconfigurations.size() << " reconfiguration(s)\n";
    return 0;
}

int cmd_analyze(const std::string& store_dir, const std::string& params, const std::string& out,
                std::optional<std::int64_t> debounce) {
    analysis::AnalysisOptions options;
    options.kinds = parse_kinds(params);
    options.debounce_s = debounce;
    if (debounce && *debounce < 0) throw ConfigError("--debounce must be >= 0");
    require_store(store_dir);
    const auto report = analysis::analyze(store_dir, options);
    analysis::write_report(report, out);
    for (const auto& day : report.days) {
        std::cout << date_string(day.day);
        for (const auto kind : options.kinds) {
            for (const auto axis : {heterogeneity::Axis::vertical, heterogeneity::Axis::horizontal}) {
                std::cout << "  " << heterogeneity::to_string(kind) << "/" << heterogeneity::to_string(axis) << ": "
                          << day.intervals_for(kind, axis).size() << " interval(s)";
            }
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_envelope(const std::string& store_dir, unsigned station, const std::string& date, const std::string& out) {
    if (station < 1 || station > 254) throw ConfigError("--station must be a station id");
    const auto day = parse_date(date);
    require_store(store_dir);
    const auto days = store::list_days(store_dir);
    if (std::find(days.begin(), days.end(), day) == days.end()) {
        throw NotReadyError("no stored data for " + date);
    }
    const auto rows = analysis::radiant_envelope(store_dir, static_cast<std::uint8_t>(station), day);
    if (rows.empty()) throw NotReadyError("no delivered records for MS-" + std::to_string(station) + " on " + date);
    with_output(out, [&](std::ostream& os) { analysis::write_envelope_csv(rows, os); });
    return 0;
}

int cmd_export_csv(const std::string& store_dir, const std::string& out) {
    require_store(store_dir);
    if (store::list_days(store_dir).empty()) throw NotReadyError("no stored day under " + store_dir);
    with_output(out, [&](std::ostream& os) { analysis::export_csv(store_dir, os); });
    return 0;
}

int cmd_verify(const std::string& store_dir) {
    require_store(store_dir);
    const auto days = store::list_days(store_dir);
    if (days.empty()) throw NotReadyError("no stored day under " + store_dir);
    bool ok = true;
    for (const auto day : days) {
        const auto res = store::verify_day(store_dir, day);
        std::cout << date_string(day) << ": " << (res.ok ? "ok" : "MISMATCH") << "\n";
        for (const auto& p : res.problems) std::cout << "  " << p << "\n";
        ok = ok && res.ok;
    }
    if (!ok) throw StorageError("store verification failed");
    return 0;
}

int cmd_backup_manifest(const std::string& store_dir, const std::string& date, const std::string& out) {
    require_store(store_dir);
    const auto text = store::export_backup_manifest(store_dir, parse_date(date));
    with_output(out, [&](std::ostream& os) { os << text; });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Greenhouse climate sensor-network simulator and heterogeneity analyser"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "greenmesh 1.0.0");

    std::string scenario_arg;
    std::string out;
    std::string store_dir;
    std::string params = "air_temp,mean_radiant_temp";
    std::string date;
    unsigned station = 0;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> debounce;

    auto* validate = app.add_subcommand("validate", "Check a scenario file or bundled scenario name");
    validate->add_option("scenario", scenario_arg, "Scenario file path or bundled name (paper-week, single-sunny, single-cloudy, plant-growth)")
        ->required();

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write its daily store");
    simulate->add_option("scenario", scenario_arg, "Scenario file path or bundled name")->required();
    simulate->add_option("--out", out, "Store root directory (created; must not hold a store)")->required();
    simulate->add_option("--seed", seed, "Override the scenario seed");

    auto* analyze = app.add_subcommand("analyze", "Heterogeneity analysis of every closed day");
    analyze->add_option("store", store_dir, "Store root directory")->required();
    analyze->add_option("--params", params,
                        "Comma-separated kinds: air_temp, mean_radiant_temp, air_velocity, vapour_pressure")
        ->capture_default_str();
    analyze->add_option("--out", out, "Report directory")->required();
    analyze->add_option("--debounce", debounce, "Merge heterogeneous runs separated by less than this many seconds");

    auto* envelope = app.add_subcommand("envelope", "Natural and forced-convection mean radiant temperature envelope");
    envelope->add_option("store", store_dir, "Store root directory")->required();
    envelope->add_option("--station", station, "Station id")->required();
    envelope->add_option("--date", date, "UTC date YYYY-MM-DD")->required();
    envelope->add_option("--out", out, "CSV file (default: stdout)");

    auto* export_csv = app.add_subcommand("export-csv", "One CSV row per record and height");
    export_csv->add_option("store", store_dir, "Store root directory")->required();
    export_csv->add_option("--out", out, "CSV file (default: stdout)");

    auto* verify = app.add_subcommand("verify", "Recompute sizes, counts and checksums of every stored day");
    verify->add_option("store", store_dir, "Store root directory")->required();

    auto* backup = app.add_subcommand("backup-manifest", "Print the backup manifest of a closed day");
    backup->add_option("store", store_dir, "Store root directory")->required();
    backup->add_option("--date", date, "UTC date YYYY-MM-DD")->required();
    backup->add_option("--out", out, "Manifest file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*validate) return cmd_validate(scenario_arg);
        if (*simulate) return cmd_simulate(scenario_arg, out, seed);
        if (*analyze) return cmd_analyze(store_dir, params, out, debounce);
        if (*envelope) return cmd_envelope(store_dir, station, date, out);
        if (*export_csv) return cmd_export_csv(store_dir, out);
        if (*verify) return cmd_verify(store_dir);
        if (*backup) return cmd_backup_manifest(store_dir, date, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NotReadyError& e) {
        std::cerr << "not ready: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const StorageError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const FormatError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}
