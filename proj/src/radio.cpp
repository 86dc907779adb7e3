#include "greenmesh/radio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenmesh/errors.hpp"

namespace greenmesh::radio {
namespace {

double logistic(double x, const DeliveryMap& m) {
    return 1.0 / (1.0 + std::exp(-(x - m.midpoint_db) / m.slope_db));
}

/// Fraction of segment a-b inside the rectangle [0, w] x [0, d].
double inside_fraction(field::Point2 a, field::Point2 b, double w, double d) {
    double t0 = 0.0;
    double t1 = 1.0;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x, w - a.x, a.y, d - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return 0.0;
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0.0) {
            t0 = std::max(t0, r);
        } else {
            t1 = std::min(t1, r);
        }
    }
    return t1 > t0 ? t1 - t0 : 0.0;
}

}  // namespace

const char* to_string(PacketKind k) {
    switch (k) {
        case PacketKind::trigger_broadcast: return "trigger";
        case PacketKind::poll: return "poll";
        case PacketKind::data: return "data";
        case PacketKind::no_data: return "no-data";
    }
    return "?";
}

double DeliveryMap::probability(double margin_db) const {
    if (!(margin_db > floor_db)) return 0.0;
    if (margin_db >= ceiling_db) return 1.0;
    const double lo = logistic(floor_db, *this);
    const double hi = logistic(ceiling_db, *this);
    return std::clamp((logistic(margin_db, *this) - lo) / (hi - lo), 0.0, 1.0);
}

void DeliveryMap::validate() const {
    if (!(slope_db > 0.0)) throw ConfigError("delivery map slope must be positive");
    if (!(ceiling_db > floor_db)) throw ConfigError("delivery map ceiling must exceed its floor");
}

void LinkParams::validate() const {
    map.validate();
    if (!(path_loss_exponent > 0.0)) throw ConfigError("path loss exponent must be positive");
    if (!(foliage_db_per_m2 >= 0.0 && row_crossing_x >= 0.0 && row_crossing_y >= 0.0)) {
        throw ConfigError("foliage parameters must be non-negative");
    }
    if (fixed_probability && !(*fixed_probability >= 0.0 && *fixed_probability <= 1.0)) {
        throw ConfigError("fixed link probability must lie in [0, 1]");
    }
}

double PlantGrowth::height(UtcSeconds t) const {
    if (t <= start) return initial_height_m;
    const double frac = static_cast<double>(t - start) / (growth_days * kSecondsPerDay);
    return std::min(final_height_m,
                    initial_height_m + (final_height_m - initial_height_m) * std::min(frac, 1.0));
}

void PlantGrowth::validate() const {
    if (!(growth_days > 0.0)) throw ConfigError("plant growth needs a positive duration");
    if (!(initial_height_m >= 0.0 && final_height_m >= initial_height_m)) {
        throw ConfigError("plant heights must satisfy 0 <= initial <= final");
    }
}

LinkQuality link_quality(const LinkModel& link, const LinkParams& params, const PlantGrowth& growth,
                         UtcSeconds t) {
    const double d = std::max(link.distance_m, 1.0);
    const double base_loss = params.reference_loss_db + 10.0 * params.path_loss_exponent * std::log10(d);
    const double foliage =
        link.foliage_exempt ? 0.0 : params.foliage_db_per_m2 * growth.height(t) * link.crossed_row_m;
    LinkQuality q;
    q.rssi_dbm = params.tx_power_dbm - base_loss - foliage;
    q.margin_db = q.rssi_dbm - params.sensitivity_dbm;
    q.probability = params.fixed_probability ? *params.fixed_probability
                                             : params.map.probability(q.margin_db);
    return q;
}

bool deliver(double probability, Rng& rng) {
    if (probability >= 1.0) return true;
    if (probability <= 0.0) return false;
    return rng.bernoulli(probability);
}

bool deliver(const LinkModel& link, const LinkParams& params, const PlantGrowth& growth,
             UtcSeconds t, Rng& rng) {
    return deliver(link_quality(link, params, growth, t).probability, rng);
}

LinkTable::LinkTable(std::vector<std::uint8_t> nodes)
    : nodes_(std::move(nodes)), p_(nodes_.size() * nodes_.size(), 0.0) {}

std::size_t LinkTable::index(std::uint8_t node) const {
    const auto it = std::find(nodes_.begin(), nodes_.end(), node);
    if (it == nodes_.end()) throw RoutingError("node " + std::to_string(node) + " not in link table");
    return static_cast<std::size_t>(it - nodes_.begin());
}

bool LinkTable::contains(std::uint8_t node) const {
    return std::find(nodes_.begin(), nodes_.end(), node) != nodes_.end();
}

double LinkTable::probability(std::uint8_t a, std::uint8_t b) const {
    if (a == b) return 1.0;
    return p_[index(a) * nodes_.size() + index(b)];
}

void LinkTable::set(std::uint8_t a, std::uint8_t b, double p) {
    const auto i = index(a);
    const auto j = index(b);
    p_[i * nodes_.size() + j] = p;
    p_[j * nodes_.size() + i] = p;
}

std::vector<std::uint8_t> RoutingTree::path_to_collector(std::uint8_t station) const {
    std::vector<std::uint8_t> path{station};
    std::uint8_t node = station;
    while (node != kCollector) {
        const auto it = parent.find(node);
        if (it == parent.end()) {
            throw RoutingError("station " + std::to_string(station) + " is not in the routing tree");
        }
        node = it->second;
        path.push_back(node);
        if (path.size() > parent.size() + 1) throw RoutingError("routing tree contains a cycle");
    }
    return path;
}

std::vector<std::uint8_t> RoutingTree::children(std::uint8_t node) const {
    std::vector<std::uint8_t> out;
    for (const auto& [child, p] : parent) {
        if (p == node) out.push_back(child);
    }
    return out;
}

std::vector<std::pair<std::uint8_t, std::uint8_t>> RoutingTree::flood_order() const {
    std::vector<std::pair<std::uint8_t, std::uint8_t>> steps;
    std::deque<std::uint8_t> frontier{kCollector};
    while (!frontier.empty()) {
        const auto node = frontier.front();
        frontier.pop_front();
        for (auto c : children(node)) {
            steps.emplace_back(node, c);
            frontier.push_back(c);
        }
    }
    return steps;
}

RoutingTree compute_routing_tree(const LinkTable& table) {
    const auto& nodes = table.nodes();
    if (!table.contains(kCollector)) throw RoutingError("link table has no collector node");

    // Widest-path labels: best achievable bottleneck per node.
    std::map<std::uint8_t, double> width;
    {
        std::map<std::uint8_t, bool> done;
        for (auto n : nodes) width[n] = 0.0;
        width[kCollector] = 1.0;
        for (std::size_t iter = 0; iter < nodes.size(); ++iter) {
            std::optional<std::uint8_t> best;
            for (auto n : nodes) {
                if (done[n] || width[n] <= 0.0) continue;
                if (!best || width[n] > width[*best] || (width[n] == width[*best] && n < *best)) best = n;
            }
            if (!best) break;
            done[*best] = true;
            for (auto m : nodes) {
                if (done[m]) continue;
                width[m] = std::max(width[m], std::min(width[*best], table.probability(*best, m)));
            }
        }
    }

    // The optimal tree bottleneck is the narrowest widest-path label.
    double floor_p = 1.0;
    for (auto n : nodes) {
        if (n != kCollector && width[n] > 0.0) floor_p = std::min(floor_p, width[n]);
    }

    // Highest-product paths over edges no weaker than that bottleneck.
    struct Label {
        double product = 0.0;
        std::size_t hops = 0;
        std::uint8_t parent = kCollector;
        bool set = false;
    };
    std::map<std::uint8_t, Label> label;
    std::map<std::uint8_t, bool> done;
    label[kCollector] = {1.0, 0, kCollector, true};
    // Products within rounding of each other tie, so equivalent paths
    // multiplied in a different order fall through to hops and ids.
    const auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };
    const auto better = [&](const Label& a, const Label& b) {
        if (!b.set) return true;
        if (!same(a.product, b.product)) return a.product > b.product;
        if (a.hops != b.hops) return a.hops < b.hops;
        return a.parent < b.parent;
    };
    for (std::size_t iter = 0; iter < nodes.size(); ++iter) {
        std::optional<std::uint8_t> u;
        for (auto n : nodes) {
            if (done[n] || !label[n].set) continue;
            if (!u) {
                u = n;
                continue;
            }
            const auto& a = label[n];
            const auto& b = label[*u];
            if (better(a, b) || (!better(b, a) && n < *u)) u = n;
        }
        if (!u) break;
        done[*u] = true;
        for (auto v : nodes) {
            if (done[v] || v == kCollector || width[v] <= 0.0) continue;
            const double p = table.probability(*u, v);
            if (p <= 0.0 || p < floor_p) continue;
            Label cand{label[*u].product * p, label[*u].hops + 1, *u, true};
            if (better(cand, label[v])) label[v] = cand;
        }
    }

    RoutingTree tree;
    for (auto n : nodes) {
        if (n == kCollector) continue;
        if (label[n].set) {
            tree.parent[n] = label[n].parent;
        } else {
            tree.unreachable.push_back(n);
        }
    }
    return tree;
}

double path_bottleneck(const RoutingTree& tree, const LinkTable& table, std::uint8_t station) {
    const auto path = tree.path_to_collector(station);
    double b = 1.0;
    for (std::size_t i = 1; i < path.size(); ++i) b = std::min(b, table.probability(path[i - 1], path[i]));
    return b;
}

double path_probability(const RoutingTree& tree, const LinkTable& table, std::uint8_t station) {
    const auto path = tree.path_to_collector(station);
    double p = 1.0;
    for (std::size_t i = 1; i < path.size(); ++i) p *= table.probability(path[i - 1], path[i]);
    return p;
}

double tree_bottleneck(const RoutingTree& tree, const LinkTable& table) {
    double b = 1.0;
    for (const auto& [child, parent] : tree.parent) b = std::min(b, table.probability(child, parent));
    return b;
}

std::vector<std::uint8_t> route(const Packet& packet, const RoutingTree& tree) {
    switch (packet.kind) {
        case PacketKind::trigger_broadcast: {
            std::vector<std::uint8_t> receivers;
            for (const auto& step : tree.flood_order()) receivers.push_back(step.second);
            return receivers;
        }
        case PacketKind::poll: {
            auto path = tree.path_to_collector(packet.destination);
            std::reverse(path.begin(), path.end());
            path.erase(path.begin());  // the collector itself
            return path;
        }
        case PacketKind::data:
        case PacketKind::no_data: {
            if (packet.destination != kCollector) {
                throw RoutingError("station-originated packets must target the collector");
            }
            auto path = tree.path_to_collector(packet.source);
            path.erase(path.begin());
            return path;
        }
    }
    return {};
}

RadioNetwork::RadioNetwork(const field::GreenhouseGeometry& geometry,
                           std::vector<std::uint8_t> stations, LinkParams params, PlantGrowth growth)
    : params_(std::move(params)), growth_(growth) {
    params_.validate();
    growth_.validate();
    nodes_.push_back(kCollector);
    for (auto s : stations) nodes_.push_back(s);
    const auto position = [&](std::uint8_t id) {
        return id == kCollector ? geometry.collector : geometry.station(id).position;
    };
    const auto relocated = [&](std::uint8_t id) {
        return std::find(params_.relocated.begin(), params_.relocated.end(), id) !=
               params_.relocated.end();
    };
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
            const auto a = nodes_[i];
            const auto b = nodes_[j];
            const auto pa = position(a);
            const auto pb = position(b);
            // Only the indoor part of a path crosses planted rows.
            const double f = inside_fraction(pa, pb, geometry.width_m, geometry.depth_m);
            const double dx = f * std::abs(pa.x - pb.x);
            const double dy = f * std::abs(pa.y - pb.y);
            LinkModel m;
            m.a = a;
            m.b = b;
            m.distance_m = std::hypot(pa.x - pb.x, pa.y - pb.y);
            m.crossed_row_m = params_.row_crossing_x * dx + params_.row_crossing_y * dy;
            m.foliage_exempt = relocated(a) || relocated(b);
            links_[{a, b}] = m;
        }
    }
}

const LinkModel& RadioNetwork::link(std::uint8_t a, std::uint8_t b) const {
    const auto it = links_.find(a < b ? std::pair{a, b} : std::pair{b, a});
    if (it == links_.end()) {
        throw RoutingError("no link between " + std::to_string(a) + " and " + std::to_string(b));
    }
    return it->second;
}

LinkQuality RadioNetwork::quality(std::uint8_t a, std::uint8_t b, UtcSeconds t) const {
    return link_quality(link(a, b), params_, growth_, t);
}

LinkTable RadioNetwork::table(UtcSeconds t) const {
    LinkTable table(nodes_);
    for (const auto& [k, m] : links_) table.set(k.first, k.second, link_quality(m, params_, growth_, t).probability);
    return table;
}

std::pair<std::uint8_t, std::uint8_t> LinkMonitor::key(std::uint8_t a, std::uint8_t b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

void LinkMonitor::record(std::uint8_t a, std::uint8_t b, bool delivered) {
    auto& h = history_[key(a, b)];
    h.outcomes.push_back(delivered);
    if (delivered) ++h.delivered;
    if (h.outcomes.size() > window_) {
        if (h.outcomes.front()) --h.delivered;
        h.outcomes.pop_front();
    }
}

std::optional<double> LinkMonitor::rate(std::uint8_t a, std::uint8_t b) const {
    const auto it = history_.find(key(a, b));
    if (it == history_.end() || it->second.outcomes.size() < window_) return std::nullopt;
    return static_cast<double>(it->second.delivered) / static_cast<double>(window_);
}

std::vector<std::pair<std::uint8_t, std::uint8_t>> LinkMonitor::degraded(const RoutingTree& tree,
                                                                         double threshold) const {
    std::vector<std::pair<std::uint8_t, std::uint8_t>> out;
    for (const auto& [child, parent] : tree.parent) {
        const auto r = rate(child, parent);
        if (r && *r < threshold) out.emplace_back(child, parent);
    }
    return out;
}

void LinkMonitor::reset(std::uint8_t a, std::uint8_t b) { history_.erase(key(a, b)); }

}  // namespace greenmesh::radio
