#include "greenmesh/engine.hpp"

#include <algorithm>
#include <json.hpp>
#include <fstream>
#include <queue>
#include <tuple>

#include "greenmesh/analysis.hpp"
#include "greenmesh/errors.hpp"
#include "greenmesh/field.hpp"
#include "greenmesh/radio.hpp"
#include "greenmesh/station.hpp"

namespace greenmesh::engine {
namespace {

using collector::SimMillis;
using nlohmann::json;

struct Later {
    bool operator()(const Event& a, const Event& b) const { return b < a; }
};

class Runner {
public:
    Runner(const scenario::Scenario& sc, const RunOptions& options)
        : sc_(sc),
          field_(sc.geometry, sc.day_profiles(), sc.start_day, derive_seed(sc.seed, {0x4649454c44ULL})),
          network_(sc.geometry, sorted(sc.stations), sc.link, sc.plants),
          stations_(make_stations(sc)),
          collector_(sc.schedule, stations_, network_, field_, sc.seed),
          writer_(options.out, sorted(sc.stations)),
          out_(options.out) {
        collector_.monitor() = radio::LinkMonitor(sc.reconfig.window);
        summary_.scenario = sc.name;
        summary_.seed = sc.seed;
        summary_.days = sc.days.size();
        for (const auto id : sc.stations) summary_.stations[id] = {};
    }

    RunSummary run() {
        const SimMillis start = 1000LL * sc_.start_time();
        end_ms_ = 1000LL * sc_.end_time();

        auto tree = radio::compute_routing_tree(network_.table(sc_.start_time()));
        tree.version = 1;
        collector_.set_tree(std::move(tree));
        track_unreachable(sc_.start_time());

        analysis::StoreContext ctx;
        ctx.scenario = sc_.name;
        for (const auto id : sorted(sc_.stations)) ctx.stations.push_back({id, sc_.geometry.station(id).outdoor});
        ctx.debounce_s = sc_.analysis.debounce_s;
        ctx.wind_calibration = sc_.analysis.wind_calibration;
        analysis::write_store_context(out_, ctx);

        for (std::size_t d = 0; d < sc_.days.size(); ++d) {
            push({start + 1000LL * kSecondsPerDay * static_cast<SimMillis>(d), EventKind::rollover});
        }
        push({start, EventKind::trigger});

        while (!queue_.empty()) {
            const Event e = queue_.top();
            queue_.pop();
            log_event(e);
            handle(e);
        }
        writer_.close();
        for (auto& [station, since] : open_unreachable_) {
            summary_.unreachable.push_back({station, since, sc_.end_time()});
        }
        std::sort(summary_.unreachable.begin(), summary_.unreachable.end(),
                  [](const auto& a, const auto& b) { return std::tie(a.start, a.station) < std::tie(b.start, b.station); });
        summary_.manifests = writer_.closed_manifests();
        summary_.event_log_sha256 = trace_.hex();
        return summary_;
    }

private:
    static std::vector<std::uint8_t> sorted(std::vector<std::uint8_t> ids) {
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    static std::vector<station::Station> make_stations(const scenario::Scenario& sc) {
        std::vector<station::Station> out;
        for (const auto id : sorted(sc.stations)) out.emplace_back(sc.geometry.station(id), sc.sensors, sc.seed);
        return out;
    }

    void push(Event e) {
        e.order = counter_++;
        queue_.push(e);
    }

    void log_event(const Event& e) {
        ++summary_.events;
        std::uint8_t buf[16] = {};
        auto t = static_cast<std::uint64_t>(e.time_ms);
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(t >> (8 * i));
        buf[8] = static_cast<std::uint8_t>(e.kind);
        buf[9] = e.station;
        buf[10] = static_cast<std::uint8_t>(e.attempt);
        trace_.update(buf, sizeof buf);
    }

    void handle(const Event& e) {
        const UtcSeconds t = collector::to_seconds(e.time_ms);
        switch (e.kind) {
            case EventKind::rollover:
                writer_.rollover(day_index(t));
                break;
            case EventKind::trigger: {
                ++summary_.rounds;
                collector_.broadcast_trigger(++sequence_, t);
                push({e.time_ms + 1000LL * sc_.schedule.settle_delay_s, EventKind::settle_done});
                const SimMillis next = e.time_ms + 1000LL * sc_.schedule.trigger_period_s;
                if (next < end_ms_) push({next, EventKind::trigger});
                break;
            }
            case EventKind::settle_done:
                follow(collector_.begin_polling(e.time_ms));
                break;
            case EventKind::poll:
            case EventKind::retry:
                follow(collector_.poll(e.station, e.attempt, e.time_ms));
                break;
            case EventKind::reconfigure_check:
                reconfigure_check(e.time_ms);
                break;
        }
    }

    void follow(const collector::PollStep& step) {
        if (!step.done) {
            push({step.at_ms, step.attempt == 0 ? EventKind::poll : EventKind::retry, step.station, step.attempt});
            return;
        }
        const auto records = collector_.take_records();
        const auto log = collector_.take_linklog();
        for (const auto& r : records) {
            auto& totals = summary_.stations[r.station];
            (r.missing() ? totals.missing : totals.delivered) += 1;
        }
        writer_.persist(records);
        writer_.persist_linklog(log);
        if (sc_.reconfig.enabled) push({step.at_ms, EventKind::reconfigure_check});
    }

    void reconfigure_check(SimMillis now_ms) {
        const UtcSeconds t = collector::to_seconds(now_ms);
        auto& monitor = collector_.monitor();
        const auto degraded = monitor.degraded(collector_.tree(), sc_.reconfig.threshold);
        if (degraded.empty()) return;

        auto next = radio::compute_routing_tree(network_.table(t));
        const radio::RoutingTree current = collector_.tree();
        ReconfigEvent ev;
        ev.time_ms = now_ms;
        ev.from_version = current.version;
        ev.to_version = current.version + 1;
        ev.degraded_links = degraded;
        next.version = ev.to_version;

        std::map<std::uint8_t, double> before;
        for (const auto& [station, parent] : next.parent) before[station] = collector_.attempt_probability(station, t);
        collector_.set_tree(next);
        bool improves = false;
        for (const auto& [station, p] : before) {
            const double after = collector_.attempt_probability(station, t);
            improves = improves || after > p * (1.0 + 1e-9);
            ev.stations.push_back({station, p, after});
        }
        // A different tree that helps no station is not worth a switch.
        if (next.same_routes(current) || !improves) {
            collector_.set_tree(current);
            for (const auto& [a, b] : degraded) monitor.reset(a, b);
            return;
        }
        summary_.reconfigurations.push_back(std::move(ev));
        monitor.reset_all();
        track_unreachable(t);
    }

    void track_unreachable(UtcSeconds t) {
        const auto& tree = collector_.tree();
        for (auto it = open_unreachable_.begin(); it != open_unreachable_.end();) {
            if (tree.reachable(it->first)) {
                summary_.unreachable.push_back({it->first, it->second, t});
                it = open_unreachable_.erase(it);
            } else {
                ++it;
            }
        }
        for (const auto id : tree.unreachable) open_unreachable_.try_emplace(id, t);
    }

    const scenario::Scenario& sc_;
    field::ClimateField field_;
    radio::RadioNetwork network_;
    std::vector<station::Station> stations_;
    collector::Collector collector_;
    store::StoreWriter writer_;
    std::filesystem::path out_;

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t counter_ = 0;
    std::uint32_t sequence_ = 0;
    SimMillis end_ms_ = 0;
    std::map<std::uint8_t, UtcSeconds> open_unreachable_;
    store::Sha256 trace_;
    RunSummary summary_;
};

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::rollover: return "rollover";
        case EventKind::trigger: return "trigger";
        case EventKind::settle_done: return "settle-done";
        case EventKind::poll: return "poll";
        case EventKind::retry: return "retry";
        case EventKind::reconfigure_check: return "reconfigure-check";
    }
    return "?";
}

bool Event::operator<(const Event& o) const {
    return std::tie(time_ms, kind, station, order) < std::tie(o.time_ms, o.kind, o.station, o.order);
}

std::uint64_t RunSummary::delivered() const {
    std::uint64_t n = 0;
    for (const auto& [id, t] : stations) n += t.delivered;
    return n;
}

std::uint64_t RunSummary::missing() const {
    std::uint64_t n = 0;
    for (const auto& [id, t] : stations) n += t.missing;
    return n;
}

std::string RunSummary::to_json() const {
    json st = json::array();
    for (const auto& [id, t] : stations) st.push_back({{"station", id}, {"delivered", t.delivered}, {"missing", t.missing}});
    json rc = json::array();
    for (const auto& ev : reconfigurations) {
        json links = json::array();
        for (const auto& [a, b] : ev.degraded_links) links.push_back({a, b});
        json deltas = json::array();
        for (const auto& d : ev.stations) deltas.push_back({{"station", d.station}, {"before", d.before}, {"after", d.after}});
        rc.push_back({{"time_utc", datetime_string(collector::to_seconds(ev.time_ms))},
                      {"time_ms", ev.time_ms},
                      {"from_version", ev.from_version},
                      {"to_version", ev.to_version},
                      {"degraded_links", links},
                      {"stations", deltas}});
    }
    json un = json::array();
    for (const auto& u : unreachable) {
        un.push_back({{"station", u.station}, {"start_utc", datetime_string(u.start)}, {"end_utc", datetime_string(u.end)}});
    }
    json days_written = json::array();
    for (const auto& m : manifests) days_written.push_back(m.date);
    const json doc{{"scenario", scenario},
                   {"seed", seed},
                   {"days", days},
                   {"rounds", rounds},
                   {"events", events},
                   {"event_log_sha256", event_log_sha256},
                   {"delivered", delivered()},
                   {"missing", missing()},
                   {"stations", st},
                   {"reconfigurations", rc},
                   {"unreachable", un},
                   {"days_written", days_written}};
    return doc.dump(2) + "\n";
}

RunSummary run(const scenario::Scenario& scenario, const RunOptions& options) {
    scenario.validate();
    if (options.out.empty()) throw ConfigError("run needs an output directory");
    Runner runner(scenario, options);
    auto summary = runner.run();
    if (options.write_summary) {
        std::ofstream out(options.out / "summary.json", std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write " + (options.out / "summary.json").string());
        out << summary.to_json();
    }
    return summary;
}

}  // namespace greenmesh::engine
