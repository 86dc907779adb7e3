#pragma once

// Brute-force reference for the best achievable tree bottleneck: every
// parent assignment over the stations is enumerated and kept when it forms
// a tree rooted at node 0; stations only take part when they can reach the
// collector over positive-probability links.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// p[i][j] symmetric link probabilities, node 0 the collector.
using Matrix = std::vector<std::vector<double>>;

inline std::vector<int> reachable_nodes(const Matrix& p) {
    const int n = static_cast<int>(p.size());
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            if (!seen[v] && p[u][v] > 0.0) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    std::vector<int> out;
    for (int v = 1; v < n; ++v) {
        if (seen[v]) out.push_back(v);
    }
    return out;
}

/// Maximum over spanning trees of the reachable component of the minimum
/// edge probability. 1.0 when no station is reachable.
inline double best_tree_bottleneck(const Matrix& p) {
    const auto nodes = reachable_nodes(p);
    if (nodes.empty()) return 1.0;
    std::vector<int> choices{0};
    choices.insert(choices.end(), nodes.begin(), nodes.end());
    const std::size_t k = nodes.size();
    std::vector<int> parent(p.size(), -1);
    double best = 0.0;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == k) {
            double bottleneck = 1.0;
            for (int v : nodes) {
                // walk to the root; more than k steps means a cycle
                int u = v;
                std::size_t steps = 0;
                while (u != 0 && steps <= k) {
                    u = parent[u];
                    ++steps;
                }
                if (u != 0) return;
                bottleneck = std::min(bottleneck, p[v][parent[v]]);
            }
            best = std::max(best, bottleneck);
            return;
        }
        for (int c : choices) {
            if (c == nodes[i] || !(p[nodes[i]][c] > 0.0)) continue;
            parent[nodes[i]] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return best;
}

}  // namespace oracle
