#pragma once

// Central control station: periodic trigger broadcast, settle delay, and a
// sequential polling round with bounded retries per station.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "greenmesh/field.hpp"
#include "greenmesh/radio.hpp"
#include "greenmesh/record.hpp"
#include "greenmesh/rng.hpp"
#include "greenmesh/station.hpp"

namespace greenmesh::collector {

/// Virtual time in milliseconds since the epoch.
using SimMillis = std::int64_t;

constexpr UtcSeconds to_seconds(SimMillis ms) { return ms >= 0 ? ms / 1000 : -((-ms + 999) / 1000); }

struct PollSchedule {
    int trigger_period_s = 20;
    int settle_delay_s = 5;
    int retries = 3;
    int poll_timeout_ms = 250;
    int hop_latency_ms = 5;
    int trigger_repeats = 3;  // broadcast retransmissions per hop

    int rounds_per_day() const { return static_cast<int>(kSecondsPerDay / trigger_period_s); }

    /// Throws ConfigError unless the round (settle plus worst-case polling
    /// of `stations`) fits inside one trigger period.
    void validate(std::size_t stations) const;
};

enum class PollOutcome : std::uint8_t { delivered, lost_down, lost_up, no_data, stale, unreachable };

const char* to_string(PollOutcome o);

struct LinkLogEntry {
    SimMillis time_ms = 0;
    std::uint32_t sequence = 0;
    std::uint8_t station = 0;
    std::uint8_t attempt = 0;
    PollOutcome outcome = PollOutcome::delivered;
    std::uint8_t hops = 0;
    double worst_rssi_dbm = 0.0;
    double min_margin_db = 0.0;
    double path_probability = 0.0;  // modelled round-trip success of one attempt
    std::uint32_t tree_version = 0;
};

/// CSV header and line for the daily link-quality log.
std::string linklog_header();
std::string linklog_line(const LinkLogEntry& e);

struct TriggerResult {
    std::vector<std::uint8_t> reached;  // stations that buffered a new sample
};

/// Next action of the polling state machine.
struct PollStep {
    bool done = false;
    std::uint8_t station = 0;
    int attempt = 0;
    SimMillis at_ms = 0;
};

class Collector {
public:
    Collector(PollSchedule schedule, std::vector<station::Station>& stations,
              const radio::RadioNetwork& network, const field::ClimateField& field, std::uint64_t seed);

    const PollSchedule& schedule() const { return schedule_; }
    const radio::RoutingTree& tree() const { return tree_; }
    void set_tree(radio::RoutingTree tree) { tree_ = std::move(tree); }
    radio::LinkMonitor& monitor() { return monitor_; }

    /// Floods the trigger down the routing tree; each hop is retried
    /// `trigger_repeats` times. Stations reached sample at `timestamp`.
    TriggerResult broadcast_trigger(std::uint32_t sequence, UtcSeconds timestamp);

    /// Starts polling for the last broadcast sequence.
    PollStep begin_polling(SimMillis now_ms);

    /// Executes one poll attempt and returns the following step.
    PollStep poll(std::uint8_t station, int attempt, SimMillis now_ms);

    /// Records completed since the last call, in poll order.
    std::vector<record::MeasurementRecord> take_records();
    std::vector<LinkLogEntry> take_linklog();

    /// Modelled round-trip probability of one attempt for a station on the
    /// current tree (0 when unreachable).
    double attempt_probability(std::uint8_t station, UtcSeconds t) const;

private:
    struct AttemptResult {
        PollOutcome outcome = PollOutcome::lost_down;
        radio::Packet reply;
        std::uint8_t hops = 0;
        double worst_rssi_dbm = 0.0;
        double min_margin_db = 0.0;
    };

    station::Station& station_ref(std::uint8_t id);
    bool hop(std::uint8_t from, std::uint8_t to, UtcSeconds t, double& worst_rssi, double& min_margin);
    AttemptResult attempt(std::uint8_t station, SimMillis now_ms);
    PollStep advance(std::size_t index_after, SimMillis at_ms);

    PollSchedule schedule_;
    std::vector<station::Station>& stations_;
    const radio::RadioNetwork& network_;
    const field::ClimateField& field_;
    radio::RoutingTree tree_;
    radio::LinkMonitor monitor_;
    Rng rng_;

    std::uint32_t sequence_ = 0;
    UtcSeconds trigger_time_ = 0;
    std::vector<std::uint8_t> order_;
    std::vector<record::MeasurementRecord> records_;
    std::vector<LinkLogEntry> linklog_;
};

/// One full synchronous round: trigger at `trigger_time`, settle, poll every
/// station in ascending id order with retries. Returns one record per
/// station, missing-flagged where delivery failed.
std::vector<record::MeasurementRecord> run_polling_round(Collector& collector, std::uint32_t sequence,
                                                         UtcSeconds trigger_time);

/// Expected delivered records per station and day for a per-attempt
/// success probability p with `retries` extra attempts in the round.
double expected_daily_deliveries(const PollSchedule& schedule, double p);

}  // namespace greenmesh::collector
