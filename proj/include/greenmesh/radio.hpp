#pragma once

// Lossy 2.4 GHz point-to-point links over the station mesh, the logical
// routing tree the collector uses on top of it, and per-link delivery
// monitoring that drives tree reconfiguration.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "greenmesh/field.hpp"
#include "greenmesh/rng.hpp"
#include "greenmesh/utc.hpp"

namespace greenmesh::radio {

/// Node 0 is the collector; stations use their MS number.
inline constexpr std::uint8_t kCollector = 0;
inline constexpr std::uint8_t kBroadcast = 0xff;

enum class PacketKind : std::uint8_t { trigger_broadcast, poll, data, no_data };

const char* to_string(PacketKind k);

struct Packet {
    PacketKind kind = PacketKind::poll;
    std::uint8_t source = kCollector;
    std::uint8_t destination = kCollector;
    std::vector<std::uint8_t> hops;  // nodes traversed so far, source first
    std::uint32_t sequence = 0;
    std::vector<std::uint8_t> payload;
};

/// Logistic map from link margin to delivery probability, rescaled so that
/// the floor maps to exactly 0 and the ceiling to exactly 1.
struct DeliveryMap {
    double midpoint_db = 10.0;
    double slope_db = 1.5;
    double floor_db = 0.0;
    double ceiling_db = 30.0;

    double probability(double margin_db) const;
    void validate() const;
};

struct LinkParams {
    double tx_power_dbm = 0.0;  // 1 mW transceivers
    double sensitivity_dbm = -92.0;
    double reference_loss_db = 40.0;  // at 1 m, 2.4 GHz
    double path_loss_exponent = 2.6;
    double foliage_db_per_m2 = 1.6;  // per metre of plant height per metre crossed
    double row_crossing_x = 0.5;     // planted fraction of a path across the rows
    double row_crossing_y = 0.15;    // planted fraction along the rows
    DeliveryMap map;
    std::optional<double> fixed_probability;  // bypasses the physical model
    std::vector<std::uint8_t> relocated;      // antennas mounted above the canopy

    void validate() const;
};

/// Linear plant growth from `initial_height_m` at `start` to
/// `final_height_m` after `growth_days`.
struct PlantGrowth {
    UtcSeconds start = 0;
    double initial_height_m = 0.0;
    double final_height_m = 2.1;
    double growth_days = 120.0;

    double height(UtcSeconds t) const;
    void validate() const;
};

struct LinkModel {
    std::uint8_t a = kCollector;
    std::uint8_t b = kCollector;
    double distance_m = 0.0;
    double crossed_row_m = 0.0;  // planted path length before scaling by height
    bool foliage_exempt = false;
};

struct LinkQuality {
    double rssi_dbm = 0.0;
    double margin_db = 0.0;
    double probability = 0.0;
};

LinkQuality link_quality(const LinkModel& link, const LinkParams& params, const PlantGrowth& growth,
                         UtcSeconds t);

/// Bernoulli draw on a probability.
bool deliver(double probability, Rng& rng);

/// Bernoulli draw on a link's probability at time t.
bool deliver(const LinkModel& link, const LinkParams& params, const PlantGrowth& growth,
             UtcSeconds t, Rng& rng);

/// Symmetric delivery probabilities between the collector and stations.
class LinkTable {
public:
    explicit LinkTable(std::vector<std::uint8_t> nodes);

    const std::vector<std::uint8_t>& nodes() const { return nodes_; }
    double probability(std::uint8_t a, std::uint8_t b) const;
    void set(std::uint8_t a, std::uint8_t b, double p);
    bool contains(std::uint8_t node) const;

private:
    std::size_t index(std::uint8_t node) const;

    std::vector<std::uint8_t> nodes_;
    std::vector<double> p_;
};

struct RoutingTree {
    std::map<std::uint8_t, std::uint8_t> parent;  // station -> next hop toward the collector
    std::vector<std::uint8_t> unreachable;
    std::uint32_t version = 0;

    bool reachable(std::uint8_t station) const { return parent.contains(station); }

    /// Station first, collector last.
    std::vector<std::uint8_t> path_to_collector(std::uint8_t station) const;
    std::vector<std::uint8_t> children(std::uint8_t node) const;

    /// Forwarding steps (from, to) of a broadcast flooded down the tree in
    /// breadth-first order; every reachable station appears once as `to`.
    std::vector<std::pair<std::uint8_t, std::uint8_t>> flood_order() const;

    bool same_routes(const RoutingTree& other) const { return parent == other.parent; }
};

/// Maximum-bottleneck spanning tree rooted at the collector. Only links at
/// least as strong as the optimal tree bottleneck are used; over those, each
/// station takes the path with the highest delivery product, then fewer
/// hops, then the lowest parent id. Stations with no positive-probability
/// path are listed as unreachable.
RoutingTree compute_routing_tree(const LinkTable& table);

/// Smallest link probability on the station's tree path.
double path_bottleneck(const RoutingTree& tree, const LinkTable& table, std::uint8_t station);

/// Product of link probabilities along the station's tree path.
double path_probability(const RoutingTree& tree, const LinkTable& table, std::uint8_t station);

/// Smallest link probability over all tree edges.
double tree_bottleneck(const RoutingTree& tree, const LinkTable& table);

/// Hop list for a packet: parent chain for upstream traffic, the reversed
/// chain for polls. Broadcasts yield the flood's receivers in order.
/// Throws RoutingError for destinations outside the tree.
std::vector<std::uint8_t> route(const Packet& packet, const RoutingTree& tree);

/// Physical mesh: link models for every node pair derived from geometry.
class RadioNetwork {
public:
    RadioNetwork(const field::GreenhouseGeometry& geometry, std::vector<std::uint8_t> stations,
                 LinkParams params, PlantGrowth growth);

    const LinkModel& link(std::uint8_t a, std::uint8_t b) const;
    LinkQuality quality(std::uint8_t a, std::uint8_t b, UtcSeconds t) const;
    LinkTable table(UtcSeconds t) const;

    const LinkParams& params() const { return params_; }
    const PlantGrowth& growth() const { return growth_; }
    const std::vector<std::uint8_t>& nodes() const { return nodes_; }

private:
    std::vector<std::uint8_t> nodes_;
    std::map<std::pair<std::uint8_t, std::uint8_t>, LinkModel> links_;
    LinkParams params_;
    PlantGrowth growth_;
};

/// Sliding window of recent transmission outcomes per undirected link.
class LinkMonitor {
public:
    explicit LinkMonitor(std::size_t window = 100) : window_(window) {}

    void record(std::uint8_t a, std::uint8_t b, bool delivered);

    /// Delivery rate over the window, once the window is full.
    std::optional<double> rate(std::uint8_t a, std::uint8_t b) const;

    /// Tree links whose full-window rate is below the threshold.
    std::vector<std::pair<std::uint8_t, std::uint8_t>> degraded(const RoutingTree& tree,
                                                                double threshold) const;

    void reset(std::uint8_t a, std::uint8_t b);
    void reset_all() { history_.clear(); }
    std::size_t window() const { return window_; }

private:
    struct History {
        std::deque<bool> outcomes;
        std::size_t delivered = 0;
    };
    static std::pair<std::uint8_t, std::uint8_t> key(std::uint8_t a, std::uint8_t b);

    std::size_t window_;
    std::map<std::pair<std::uint8_t, std::uint8_t>, History> history_;
};

}  // namespace greenmesh::radio
