#pragma once

// Discrete-event scheduler running a scenario end to end in virtual time.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "greenmesh/collector.hpp"
#include "greenmesh/scenario.hpp"
#include "greenmesh/store.hpp"

namespace greenmesh::engine {

/// Kinds in tie-break rank order for simultaneous events.
enum class EventKind : std::uint8_t { rollover, trigger, settle_done, poll, retry, reconfigure_check };

const char* to_string(EventKind k);

struct Event {
    collector::SimMillis time_ms = 0;
    EventKind kind = EventKind::trigger;
    std::uint8_t station = 0;
    int attempt = 0;
    std::uint64_t order = 0;  // insertion counter, last tie-break

    /// Strict weak ordering: time, kind rank, station, insertion order.
    bool operator<(const Event& other) const;
};

struct StationDelta {
    std::uint8_t station = 0;
    double before = 0.0;  // modelled per-attempt round-trip probability
    double after = 0.0;
};

struct ReconfigEvent {
    collector::SimMillis time_ms = 0;
    std::uint32_t from_version = 0;
    std::uint32_t to_version = 0;
    std::vector<std::pair<std::uint8_t, std::uint8_t>> degraded_links;
    std::vector<StationDelta> stations;  // reachable under the new tree
};

struct UnreachableInterval {
    std::uint8_t station = 0;
    UtcSeconds start = 0;
    UtcSeconds end = 0;
};

struct StationTotals {
    std::uint64_t delivered = 0;
    std::uint64_t missing = 0;
};

struct RunSummary {
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint64_t days = 0;
    std::uint64_t rounds = 0;
    std::uint64_t events = 0;
    std::string event_log_sha256;  // digest of the full event trace
    std::map<std::uint8_t, StationTotals> stations;
    std::vector<ReconfigEvent> reconfigurations;
    std::vector<UnreachableInterval> unreachable;
    std::vector<store::Manifest> manifests;

    std::uint64_t delivered() const;
    std::uint64_t missing() const;
    std::string to_json() const;
};

struct RunOptions {
    std::filesystem::path out;  // store root; receives data/ and summary.json
    bool write_summary = true;
};

/// Runs every event of the scenario. Validation happens before any event
/// executes (ConfigError).
RunSummary run(const scenario::Scenario& scenario, const RunOptions& options);

}  // namespace greenmesh::engine
