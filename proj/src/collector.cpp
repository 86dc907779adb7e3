#include "greenmesh/collector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "greenmesh/errors.hpp"

namespace greenmesh::collector {

void PollSchedule::validate(std::size_t stations) const {
    if (trigger_period_s <= 0) throw ConfigError("trigger period must be positive");
    if (kSecondsPerDay % trigger_period_s != 0) throw ConfigError("trigger period must divide one day");
    if (settle_delay_s < 0 || settle_delay_s >= trigger_period_s) {
        throw ConfigError("settle delay must satisfy 0 <= settle < trigger period");
    }
    if (retries < 0) throw ConfigError("retry count must be >= 0");
    if (poll_timeout_ms <= 0) throw ConfigError("poll timeout must be positive");
    if (hop_latency_ms < 0 || 2 * 16 * hop_latency_ms > poll_timeout_ms) {
        throw ConfigError("hop latency must be >= 0 and a 16-hop round trip must fit the poll timeout");
    }
    if (trigger_repeats < 1) throw ConfigError("trigger repeats must be >= 1");
    const long long worst = 1000LL * settle_delay_s +
                            static_cast<long long>(stations) * (retries + 1) * poll_timeout_ms;
    if (worst >= 1000LL * trigger_period_s) {
        throw ConfigError("worst-case polling round (" + std::to_string(worst) +
                          " ms) does not fit inside the trigger period");
    }
}

const char* to_string(PollOutcome o) {
    switch (o) {
        case PollOutcome::delivered: return "delivered";
        case PollOutcome::lost_down: return "lost_down";
        case PollOutcome::lost_up: return "lost_up";
        case PollOutcome::no_data: return "no_data";
        case PollOutcome::stale: return "stale";
        case PollOutcome::unreachable: return "unreachable";
    }
    return "?";
}

std::string linklog_header() {
    return "time_ms,datetime_utc,sequence,station,attempt,outcome,hops,worst_rssi_dbm,min_margin_db,"
           "path_probability,tree_version\n";
}

std::string linklog_line(const LinkLogEntry& e) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%lld,%s,%u,%u,%u,%s,%u,%.1f,%.1f,%.4f,%u\n",
                  static_cast<long long>(e.time_ms), datetime_string(to_seconds(e.time_ms)).c_str(),
                  e.sequence, unsigned{e.station}, unsigned{e.attempt}, to_string(e.outcome),
                  unsigned{e.hops}, e.worst_rssi_dbm, e.min_margin_db, e.path_probability,
                  e.tree_version);
    return buf;
}

Collector::Collector(PollSchedule schedule, std::vector<station::Station>& stations,
                     const radio::RadioNetwork& network, const field::ClimateField& field,
                     std::uint64_t seed)
    : schedule_(schedule),
      stations_(stations),
      network_(network),
      field_(field),
      rng_(derive_seed(seed, {0x434f4cULL})) {
    schedule_.validate(stations_.size());
    for (const auto& s : stations_) order_.push_back(s.id());
    std::sort(order_.begin(), order_.end());
    if (std::adjacent_find(order_.begin(), order_.end()) != order_.end()) {
        throw ConfigError("duplicate station id");
    }
}

station::Station& Collector::station_ref(std::uint8_t id) {
    for (auto& s : stations_) {
        if (s.id() == id) return s;
    }
    throw RoutingError("no station MS-" + std::to_string(id));
}

TriggerResult Collector::broadcast_trigger(std::uint32_t sequence, UtcSeconds timestamp) {
    sequence_ = sequence;
    trigger_time_ = timestamp;
    TriggerResult result;
    std::vector<std::uint8_t> informed{radio::kCollector};
    const station::TriggerPacket trigger{sequence, timestamp};
    for (const auto& [from, to] : tree_.flood_order()) {
        if (std::find(informed.begin(), informed.end(), from) == informed.end()) continue;
        const double p = network_.quality(from, to, timestamp).probability;
        bool got = false;
        for (int r = 0; r < schedule_.trigger_repeats && !got; ++r) got = radio::deliver(p, rng_);
        if (!got) continue;
        informed.push_back(to);
        if (station_ref(to).on_trigger(trigger, field_)) result.reached.push_back(to);
    }
    return result;
}

PollStep Collector::begin_polling(SimMillis now_ms) { return advance(0, now_ms); }

PollStep Collector::advance(std::size_t index, SimMillis at_ms) {
    if (index >= order_.size()) return PollStep{true, 0, 0, at_ms};
    return PollStep{false, order_[index], 0, at_ms};
}

bool Collector::hop(std::uint8_t from, std::uint8_t to, UtcSeconds t, double& worst_rssi,
                    double& min_margin) {
    const auto q = network_.quality(from, to, t);
    worst_rssi = std::min(worst_rssi, q.rssi_dbm);
    min_margin = std::min(min_margin, q.margin_db);
    const bool ok = radio::deliver(q.probability, rng_);
    monitor_.record(from, to, ok);
    return ok;
}

Collector::AttemptResult Collector::attempt(std::uint8_t station, SimMillis now_ms) {
    const UtcSeconds t = to_seconds(now_ms);
    AttemptResult res;
    res.worst_rssi_dbm = std::numeric_limits<double>::infinity();
    res.min_margin_db = std::numeric_limits<double>::infinity();

    radio::Packet poll;
    poll.kind = radio::PacketKind::poll;
    poll.source = radio::kCollector;
    poll.destination = station;
    poll.sequence = sequence_;
    poll.hops = {radio::kCollector};
    const auto down = radio::route(poll, tree_);
    res.hops = static_cast<std::uint8_t>(down.size());

    std::uint8_t at = radio::kCollector;
    for (const auto next : down) {
        if (!hop(at, next, t, res.worst_rssi_dbm, res.min_margin_db)) {
            res.outcome = PollOutcome::lost_down;
            return res;
        }
        at = next;
        poll.hops.push_back(next);
    }

    radio::Packet reply = station_ref(station).on_poll(poll);
    const auto up = radio::route(reply, tree_);
    at = station;
    for (const auto next : up) {
        if (!hop(at, next, t, res.worst_rssi_dbm, res.min_margin_db)) {
            res.outcome = PollOutcome::lost_up;
            return res;
        }
        at = next;
        reply.hops.push_back(next);
    }
    if (reply.kind == radio::PacketKind::no_data) {
        res.outcome = PollOutcome::no_data;
    } else if (reply.sequence != sequence_) {
        res.outcome = PollOutcome::stale;
    } else {
        res.outcome = PollOutcome::delivered;
    }
    res.reply = std::move(reply);
    return res;
}

PollStep Collector::poll(std::uint8_t station, int attempt_no, SimMillis now_ms) {
    const auto it = std::find(order_.begin(), order_.end(), station);
    if (it == order_.end()) throw RoutingError("poll for unknown station MS-" + std::to_string(station));
    const auto index = static_cast<std::size_t>(it - order_.begin());

    LinkLogEntry log;
    log.time_ms = now_ms;
    log.sequence = sequence_;
    log.station = station;
    log.attempt = static_cast<std::uint8_t>(attempt_no);
    log.tree_version = tree_.version;

    if (!tree_.reachable(station)) {
        log.outcome = PollOutcome::unreachable;
        linklog_.push_back(log);
        records_.push_back(record::missing_record(station, sequence_, static_cast<std::uint64_t>(trigger_time_),
                                                  record::kFlagUnreachable));
        return advance(index + 1, now_ms);
    }

    log.path_probability = attempt_probability(station, to_seconds(now_ms));
    const auto res = attempt(station, now_ms);
    log.outcome = res.outcome;
    log.hops = res.hops;
    log.worst_rssi_dbm = res.worst_rssi_dbm;
    log.min_margin_db = res.min_margin_db;
    linklog_.push_back(log);

    const SimMillis round_trip = 2LL * res.hops * schedule_.hop_latency_ms;
    const auto ts = static_cast<std::uint64_t>(trigger_time_);
    switch (res.outcome) {
        case PollOutcome::delivered: {
            auto r = record::decode_payload(res.reply.payload);
            r.hops = res.hops;
            const double deci = std::round(res.worst_rssi_dbm * 10.0);
            r.rssi_deci = static_cast<std::int16_t>(std::clamp(deci, -32767.0, 32767.0));
            records_.push_back(r);
            return advance(index + 1, now_ms + round_trip);
        }
        case PollOutcome::no_data:
            records_.push_back(record::missing_record(station, sequence_, ts, record::kFlagNoData));
            return advance(index + 1, now_ms + round_trip);
        case PollOutcome::stale:
            records_.push_back(record::missing_record(station, sequence_, ts, record::kFlagStale));
            return advance(index + 1, now_ms + round_trip);
        case PollOutcome::lost_down:
        case PollOutcome::lost_up:
        case PollOutcome::unreachable:
            break;
    }
    const SimMillis next = now_ms + schedule_.poll_timeout_ms;
    if (attempt_no < schedule_.retries) return PollStep{false, station, attempt_no + 1, next};
    records_.push_back(record::missing_record(station, sequence_, ts, 0));
    return advance(index + 1, next);
}

double Collector::attempt_probability(std::uint8_t station, UtcSeconds t) const {
    if (!tree_.reachable(station)) return 0.0;
    const auto path = tree_.path_to_collector(station);
    double p = 1.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double q = network_.quality(path[i], path[i + 1], t).probability;
        p *= q * q;
    }
    return p;
}

std::vector<record::MeasurementRecord> Collector::take_records() { return std::exchange(records_, {}); }

std::vector<LinkLogEntry> Collector::take_linklog() { return std::exchange(linklog_, {}); }

std::vector<record::MeasurementRecord> run_polling_round(Collector& collector, std::uint32_t sequence,
                                                         UtcSeconds trigger_time) {
    collector.broadcast_trigger(sequence, trigger_time);
    auto step = collector.begin_polling(1000LL * (trigger_time + collector.schedule().settle_delay_s));
    while (!step.done) step = collector.poll(step.station, step.attempt, step.at_ms);
    return collector.take_records();
}

double expected_daily_deliveries(const PollSchedule& schedule, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability must lie in [0, 1]");
    return static_cast<double>(kSecondsPerDay) / schedule.trigger_period_s *
           (1.0 - std::pow(1.0 - p, schedule.retries + 1));
}

}  // namespace greenmesh::collector
