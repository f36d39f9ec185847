#pragma once

// Dominating-set reference strategy.
//
// For a message window [t0, t1] we build the digraph u -> v whenever a
// time-respecting chain of contacts carries content from u to v inside the
// window, assuming transfers take no time (so relay inside a connected
// component at a single instant is allowed). The controller then pushes to a
// greedy dominating set of that digraph.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "common.hpp"
#include "contacts.hpp"

namespace pnt {

class ReachabilityDigraph {
public:
    ReachabilityDigraph() = default;

    // `out[i]` lists out-neighbours of vertices[i] as vertex indices.
    ReachabilityDigraph(std::vector<NodeId> vertices, std::vector<std::vector<std::size_t>> out)
        : vertices_(std::move(vertices)), out_(std::move(out)) {
        for (auto& o : out_) {
            std::sort(o.begin(), o.end());
            o.erase(std::unique(o.begin(), o.end()), o.end());
        }
    }

    std::span<const NodeId> vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    std::span<const std::size_t> out(std::size_t v) const noexcept { return out_[v]; }

    std::optional<std::size_t> index(NodeId n) const noexcept {
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), n);
        if (it == vertices_.end() || *it != n) return std::nullopt;
        return static_cast<std::size_t>(it - vertices_.begin());
    }

    bool has_edge(NodeId u, NodeId v) const noexcept {
        auto iu = index(u);
        auto iv = index(v);
        if (!iu || !iv) return false;
        return std::binary_search(out_[*iu].begin(), out_[*iu].end(), *iv);
    }

    std::size_t edge_count() const noexcept {
        std::size_t n = 0;
        for (const auto& o : out_) n += o.size();
        return n;
    }

    std::size_t max_out_degree() const noexcept {
        std::size_t k = 0;
        for (const auto& o : out_) k = std::max(k, o.size());
        return k;
    }

    // Largest closed out-neighbourhood |{v} ∪ out(v)|; the reachability
    // relation is reflexive, so this is the out-degree counting the self-path.
    std::size_t max_closed_degree() const noexcept {
        std::size_t k = 0;
        for (std::size_t v = 0; v < out_.size(); ++v) {
            const bool self = std::binary_search(out_[v].begin(), out_[v].end(), v);
            k = std::max(k, out_[v].size() + (self ? 0 : 1));
        }
        return k;
    }

private:
    std::vector<NodeId> vertices_;  // sorted
    std::vector<std::vector<std::size_t>> out_;
};

// Earliest-arrival sweep from every window-present node. A contact [s, e]
// carries content from a node infected at time tau to its peer at
// max(s, tau) provided tau <= e.
inline ReachabilityDigraph reachability_digraph(const ContactTrace& ct, double t0, double t1) {
    if (!(t0 < t1)) throw ConfigError("reachability window must satisfy t0 < t1");

    std::vector<NodeId> vertices;
    for (const auto& n : ct.nodes())
        if (n.presence.enter <= t1 && n.presence.leave >= t0) vertices.push_back(n.id);
    const std::size_t n = vertices.size();

    struct Link {
        std::size_t peer;
        double start;
        double end;
    };
    std::vector<std::vector<Link>> links(n);
    auto index = [&](NodeId id) -> std::optional<std::size_t> {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), id);
        if (it == vertices.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - vertices.begin());
    };
    for (const auto& c : ct.contacts()) {
        if (c.start > t1) break;
        if (c.end < t0) continue;
        auto ia = index(c.a);
        auto ib = index(c.b);
        if (!ia || !ib) continue;
        const double s = std::max(c.start, t0);
        const double e = std::min(c.end, t1);
        links[*ia].push_back({*ib, s, e});
        links[*ib].push_back({*ia, s, e});
    }

    std::vector<std::vector<std::size_t>> out(n);
    std::vector<double> arrival(n);
    using Item = std::pair<double, std::size_t>;
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(arrival.begin(), arrival.end(), std::numeric_limits<double>::infinity());
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        arrival[src] = t0;
        pq.emplace(t0, src);
        while (!pq.empty()) {
            auto [tau, u] = pq.top();
            pq.pop();
            if (tau > arrival[u]) continue;
            for (const auto& l : links[u]) {
                if (tau > l.end) continue;
                const double reach = std::max(l.start, tau);
                if (reach < arrival[l.peer]) {
                    arrival[l.peer] = reach;
                    pq.emplace(reach, l.peer);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v)
            if (v != src && arrival[v] <= t1) out[src].push_back(v);
    }
    return ReachabilityDigraph(std::move(vertices), std::move(out));
}

// Repeatedly pick the vertex whose closed out-neighbourhood covers the most
// uncovered vertices; ties go to the smallest NodeId. Returns sorted ids.
inline std::vector<NodeId> greedy_dominating_set(const ReachabilityDigraph& g) {
    const std::size_t n = g.size();
    std::vector<char> covered(n, 0);
    std::size_t remaining = n;
    std::vector<NodeId> chosen;
    while (remaining > 0) {
        std::size_t best = n;
        std::size_t best_gain = 0;
        for (std::size_t v = 0; v < n; ++v) {
            std::size_t gain = covered[v] ? 0 : 1;
            for (auto w : g.out(v))
                if (w != v && !covered[w]) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = v;
            }
        }
        chosen.push_back(g.vertices()[best]);
        if (!covered[best]) {
            covered[best] = 1;
            --remaining;
        }
        for (auto w : g.out(best))
            if (!covered[w]) {
                covered[w] = 1;
                --remaining;
            }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

inline bool is_dominating(const ReachabilityDigraph& g, std::span<const NodeId> d) {
    std::vector<char> covered(g.size(), 0);
    for (auto id : d) {
        auto v = g.index(id);
        if (!v) return false;
        covered[*v] = 1;
        for (auto w : g.out(*v)) covered[w] = 1;
    }
    return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

inline std::vector<NodeId> oracle_initial_pushes(const ContactTrace& ct, double t0, double t1) {
    return greedy_dominating_set(reachability_digraph(ct, t0, t1));
}

}  // namespace pnt
