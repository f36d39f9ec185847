#pragma once

// The control loop: subscription and acknowledgement tracking, the number of
// copies to inject at each decision instant, and the choice of recipients.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "common.hpp"
#include "contacts.hpp"
#include "messages.hpp"
#include "quadtree.hpp"
#include "strategies.hpp"

namespace pnt {

struct PositionReport {
    Point position;
    Time at{};
};

struct NeighborReport {
    std::vector<NodeId> neighbors;
    Time at{};
};

// The controller's view of the world. It only changes through delivered
// control messages and the controller's own push decisions.
struct ControllerState {
    std::uint32_t message = 0;
    std::set<NodeId> subscribed;
    std::set<NodeId> ever_subscribed;
    std::set<NodeId> acked;
    std::set<NodeId> pending;  // pushes initiated and not yet acknowledged or failed
    std::map<NodeId, Time> entry_time;
    std::map<NodeId, PositionReport> last_position;
    std::map<NodeId, NeighborReport> last_neighbors;
    std::uint64_t anomalies = 0;
    std::uint64_t stale_acks = 0;

    bool estimated_infected(NodeId n) const { return acked.contains(n) || pending.contains(n); }

    // |(acked ∪ pending) ∩ subscribed|
    std::size_t estimated_infected_count() const {
        std::size_t c = 0;
        for (auto n : subscribed)
            if (estimated_infected(n)) ++c;
        return c;
    }

    // Subscribed nodes neither acknowledged nor being pushed to, ascending.
    std::vector<NodeId> candidates() const {
        std::vector<NodeId> out;
        for (auto n : subscribed)
            if (!estimated_infected(n)) out.push_back(n);
        return out;
    }

    void begin_message(std::uint32_t id) {
        message = id;
        acked.clear();
        pending.clear();
    }
};

inline void handle_control(ControllerState& s, const ControlMessage& m, Time now) {
    (void)now;
    switch (m.kind) {
        case ControlKind::enter:
            s.subscribed.insert(m.node);
            s.ever_subscribed.insert(m.node);
            s.entry_time[m.node] = m.generated;
            break;
        case ControlKind::leave:
            s.subscribed.erase(m.node);
            s.acked.erase(m.node);
            s.pending.erase(m.node);
            s.entry_time.erase(m.node);
            s.last_position.erase(m.node);
            s.last_neighbors.erase(m.node);
            break;
        case ControlKind::ack:
            if (!s.ever_subscribed.contains(m.node)) {
                ++s.anomalies;
                break;
            }
            if (m.message != s.message) {
                ++s.stale_acks;
                break;
            }
            if (s.subscribed.contains(m.node)) s.acked.insert(m.node);
            s.pending.erase(m.node);
            break;
        case ControlKind::gps_report:
            if (s.subscribed.contains(m.node)) s.last_position[m.node] = {m.position, m.generated};
            break;
        case ControlKind::neighbor_report:
            if (s.subscribed.contains(m.node)) s.last_neighbors[m.node] = {m.neighbors, m.generated};
            break;
    }
}

// Additional copies needed to bring the estimated infection ratio up to the
// objective at lifetime fraction x. Push-and-wait strategies inject their
// fixed count at the first decision and nothing afterwards.
inline std::size_t copies_needed(const ControllerState& s, WhenStrategy w, double x, bool first_decision) {
    if (!is_curve(w)) {
        if (!first_decision) return 0;
        return std::min(initial_copies(w), s.candidates().size());
    }
    const double target = objective_value(w, x) * static_cast<double>(s.subscribed.size());
    const auto wanted = static_cast<std::size_t>(std::max(0.0, std::ceil(target - 1e-9)));
    const auto have = s.estimated_infected_count();
    return wanted > have ? wanted - have : 0;
}

// --- recipient selection ----------------------------------------------------

struct SelectionContext {
    Rng* rng = nullptr;
    Rect area{};
};

// Potential felt by a node at p: 1/d to every infected position plus one
// infected-node equivalent per side of the area, at the perpendicular
// distance to that side.
inline double side_potential(Point p, const Rect& area) {
    return 1.0 / (p.x - area.xmin) + 1.0 / (area.xmax - p.x) + 1.0 / (p.y - area.ymin) +
           1.0 / (area.ymax - p.y);
}

inline double coulomb_potential(Point p, std::span<const Point> infected, const Rect& area) {
    double v = side_potential(p, area);
    for (const auto& q : infected) v += 1.0 / distance(p, q);
    return v;
}

namespace detail {

inline std::vector<NodeId> pick_random(std::vector<NodeId> pool, std::size_t k, Rng& rng) {
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

inline std::vector<NodeId> by_entry(const ControllerState& s, std::vector<NodeId> cand, std::size_t k,
                                    WhomStrategy w) {
    double mean = 0.0;
    if (w == WhomStrategy::entry_average && !s.subscribed.empty()) {
        for (auto n : s.subscribed) mean += to_seconds(s.entry_time.at(n));
        mean /= static_cast<double>(s.subscribed.size());
    }
    auto key = [&](NodeId n) {
        const double e = to_seconds(s.entry_time.at(n));
        switch (w) {
            case WhomStrategy::entry_oldest: return e;
            case WhomStrategy::entry_newest: return -e;
            default: return std::abs(e - mean);
        }
    };
    std::stable_sort(cand.begin(), cand.end(), [&](NodeId a, NodeId b) {
        const double ka = key(a);
        const double kb = key(b);
        return ka != kb ? ka < kb : a < b;
    });
    cand.resize(std::min(k, cand.size()));
    return cand;
}

inline std::vector<NodeId> by_density(const ControllerState& s, const std::vector<NodeId>& cand, std::size_t k,
                                      const Rect& area) {
    std::vector<NodeId> ids;
    std::vector<Point> pts;
    for (auto n : s.subscribed)
        if (auto it = s.last_position.find(n); it != s.last_position.end()) {
            ids.push_back(n);
            pts.push_back(it->second.position);
        }
    std::vector<NodeId> out;
    std::set<NodeId> candidate_set(cand.begin(), cand.end());
    if (!pts.empty()) {
        QuadTree tree(area, pts);
        for (const auto* leaf : tree.by_density()) {
            for (auto i : leaf->points) {
                if (out.size() == k) return out;
                if (candidate_set.erase(ids[i])) out.push_back(ids[i]);
            }
        }
    }
    // Candidates that never reported a position come last.
    for (auto n : cand) {
        if (out.size() == k) break;
        if (candidate_set.erase(n)) out.push_back(n);
    }
    return out;
}

inline std::vector<NodeId> by_potential(const ControllerState& s, const std::vector<NodeId>& cand,
                                        std::size_t k, const Rect& area) {
    std::vector<Point> infected;
    for (auto n : s.subscribed)
        if (s.estimated_infected(n))
            if (auto it = s.last_position.find(n); it != s.last_position.end())
                infected.push_back(it->second.position);
    std::vector<std::pair<double, NodeId>> ranked;
    std::vector<NodeId> unknown;
    for (auto n : cand) {
        if (auto it = s.last_position.find(n); it != s.last_position.end())
            ranked.emplace_back(coulomb_potential(it->second.position, infected, area), n);
        else
            unknown.push_back(n);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<NodeId> out;
    for (const auto& [v, n] : ranked) {
        if (out.size() == k) return out;
        out.push_back(n);
    }
    for (auto n : unknown) {
        if (out.size() == k) break;
        out.push_back(n);
    }
    return out;
}

inline std::vector<NodeId> by_components(const ControllerState& s, std::size_t k, Rng& rng) {
    std::vector<NodeId> nodes(s.subscribed.begin(), s.subscribed.end());
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [n, rep] : s.last_neighbors)
        for (auto m : rep.neighbors)
            if (s.subscribed.contains(m) && m != n) edges.emplace_back(n, m);

    struct Group {
        std::vector<NodeId> candidates;
        std::size_t size;
        bool infected;
        NodeId first;
    };
    std::vector<Group> groups;
    for (auto& comp : connected_components(nodes, edges)) {
        Group g{{}, comp.size(), false, comp.front()};
        for (auto n : comp) {
            if (s.estimated_infected(n))
                g.infected = true;
            else
                g.candidates.push_back(n);
        }
        if (!g.candidates.empty()) groups.push_back(std::move(g));
    }

    std::vector<NodeId> out;
    auto take = [&](Group& g) {
        const auto j = static_cast<std::size_t>(rng.below(g.candidates.size()));
        out.push_back(g.candidates[j]);
        g.candidates.erase(g.candidates.begin() + static_cast<std::ptrdiff_t>(j));
        g.infected = true;
    };

    // One copy per entirely uninfected component, largest first.
    std::vector<Group*> clean;
    for (auto& g : groups)
        if (!g.infected) clean.push_back(&g);
    std::stable_sort(clean.begin(), clean.end(), [](const Group* a, const Group* b) {
        return a->size != b->size ? a->size > b->size : a->first < b->first;
    });
    for (auto* g : clean) {
        if (out.size() == k) return out;
        take(*g);
    }
    // Then the component with the most uninfected nodes, repeatedly.
    while (out.size() < k) {
        Group* best = nullptr;
        for (auto& g : groups)
            if (!g.candidates.empty() &&
                (!best || g.candidates.size() > best->candidates.size() ||
                 (g.candidates.size() == best->candidates.size() && g.first < best->first)))
                best = &g;
        if (!best) break;
        take(*best);
    }
    return out;
}

}  // namespace detail

// Up to k distinct recipients among subscribed, unacknowledged nodes with no
// push in progress.
inline std::vector<NodeId> select_targets(const ControllerState& s, WhomStrategy whom, std::size_t k,
                                          const SelectionContext& ctx) {
    auto cand = s.candidates();
    if (k == 0 || cand.empty()) return {};
    switch (whom) {
        case WhomStrategy::random: return detail::pick_random(std::move(cand), k, *ctx.rng);
        case WhomStrategy::entry_oldest:
        case WhomStrategy::entry_average:
        case WhomStrategy::entry_newest: return detail::by_entry(s, std::move(cand), k, whom);
        case WhomStrategy::gps_density: return detail::by_density(s, cand, k, ctx.area);
        case WhomStrategy::gps_potential: return detail::by_potential(s, cand, k, ctx.area);
        case WhomStrategy::connected_components: return detail::by_components(s, k, *ctx.rng);
    }
    return {};
}

struct ControllerConfig {
    WhenStrategy when = WhenStrategy::linear;
    WhomStrategy whom = WhomStrategy::random;
    Time tick_interval = Time{20'000'000};
    Time first_decision = Time{1'000'000};
};

// Decision at a control-loop instant `now` for message `msg`. Targets are
// recorded as pending before being returned.
inline std::vector<NodeId> tick(ControllerState& s, const ControllerConfig& cfg, const ContentMessage& msg,
                                Time now, const SelectionContext& ctx) {
    const double x = std::clamp(static_cast<double>((now - msg.created).count()) /
                                    static_cast<double>(msg.lifetime().count()),
                                0.0, 1.0);
    const bool first = now == msg.created + cfg.first_decision;
    const auto n = copies_needed(s, cfg.when, x, first);
    auto targets = select_targets(s, cfg.whom, n, ctx);
    for (auto t : targets) s.pending.insert(t);
    return targets;
}

// Panic zone: every subscribed node without the content or a push in flight.
inline std::vector<NodeId> panic(ControllerState& s) {
    auto targets = s.candidates();
    for (auto t : targets) s.pending.insert(t);
    return targets;
}

}  // namespace pnt
