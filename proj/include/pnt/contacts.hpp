#pragma once

// Contacts between nodes, instantaneous connectivity graphs, and the dataset
// statistics computed over them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"
#include "detail/csv.hpp"
#include "mobility.hpp"

namespace pnt {

struct Contact {
    NodeId a{};  // a < b
    NodeId b{};
    double start = 0.0;
    double end = 0.0;

    double duration() const noexcept { return end - start; }
    bool operator==(const Contact&) const = default;
};

enum class ContactEdge : std::uint8_t { up, down };

struct ContactEvent {
    double time = 0.0;
    NodeId a{};
    NodeId b{};
    ContactEdge edge = ContactEdge::up;
};

struct NodePresence {
    NodeId id{};
    Presence presence;
    bool operator==(const NodePresence&) const = default;
};

inline std::uint64_t pair_key(NodeId a, NodeId b) noexcept {
    if (b < a) std::swap(a, b);
    return (static_cast<std::uint64_t>(raw(a)) << 32) | raw(b);
}

class ContactTrace {
public:
    ContactTrace() = default;

    ContactTrace(double range, double step, std::vector<NodePresence> nodes,
                 std::vector<Contact> contacts)
        : range_(range), step_(step), nodes_(std::move(nodes)), contacts_(std::move(contacts)) {
        std::sort(nodes_.begin(), nodes_.end(),
                  [](const auto& x, const auto& y) { return x.id < y.id; });
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (nodes_[i - 1].id == nodes_[i].id) throw Error("duplicate node " + to_string(nodes_[i].id));
        for (const auto& n : nodes_) {
            if (n.presence.leave < n.presence.enter)
                throw Error("node " + to_string(n.id) + " leaves before entering");
            duration_ = std::max(duration_, n.presence.leave);
        }
        for (auto& c : contacts_) {
            if (c.b < c.a) std::swap(c.a, c.b);
            if (c.a == c.b) throw Error("self contact on node " + to_string(c.a));
            if (!(c.start < c.end)) throw Error("contact with empty interval");
            const auto* pa = find(c.a);
            const auto* pb = find(c.b);
            if (!pa || !pb) throw Error("contact references an unknown node");
            if (c.start < std::max(pa->enter, pb->enter) || c.end > std::min(pa->leave, pb->leave))
                throw Error("contact " + to_string(c.a) + "-" + to_string(c.b) +
                            " outside joint presence");
        }
        std::sort(contacts_.begin(), contacts_.end(), [](const Contact& x, const Contact& y) {
            return std::tie(x.start, x.a, x.b) < std::tie(y.start, y.a, y.b);
        });
        std::unordered_map<std::uint64_t, double> last_end;
        for (const auto& c : contacts_) {
            auto [it, fresh] = last_end.try_emplace(pair_key(c.a, c.b), c.end);
            if (!fresh) {
                if (!(c.start > it->second))
                    throw Error("overlapping or adjacent contacts for pair " + to_string(c.a) + "-" +
                                to_string(c.b));
                it->second = c.end;
            }
        }
    }

    double range() const noexcept { return range_; }
    double step() const noexcept { return step_; }
    double duration() const noexcept { return duration_; }
    std::span<const NodePresence> nodes() const noexcept { return nodes_; }
    std::span<const Contact> contacts() const noexcept { return contacts_; }

    const Presence* find(NodeId n) const noexcept {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n,
                                   [](const NodePresence& p, NodeId v) { return p.id < v; });
        return (it != nodes_.end() && it->id == n) ? &it->presence : nullptr;
    }

    // Up/down events ordered by (time, pair, up before down).
    std::vector<ContactEvent> events() const {
        std::vector<ContactEvent> ev;
        ev.reserve(contacts_.size() * 2);
        for (const auto& c : contacts_) {
            ev.push_back({c.start, c.a, c.b, ContactEdge::up});
            ev.push_back({c.end, c.a, c.b, ContactEdge::down});
        }
        std::sort(ev.begin(), ev.end(), [](const ContactEvent& x, const ContactEvent& y) {
            return std::tuple(x.time, pair_key(x.a, x.b), x.edge) <
                   std::tuple(y.time, pair_key(y.a, y.b), y.edge);
        });
        return ev;
    }

    // Restriction to a node subset; contacts with a dropped endpoint vanish.
    template <typename Keep>
    ContactTrace filter(Keep&& keep) const {
        std::vector<NodePresence> n;
        for (const auto& p : nodes_)
            if (keep(p.id)) n.push_back(p);
        std::vector<Contact> c;
        for (const auto& x : contacts_)
            if (keep(x.a) && keep(x.b)) c.push_back(x);
        ContactTrace out(range_, step_, std::move(n), std::move(c));
        out.duration_ = duration_;
        return out;
    }

    bool operator==(const ContactTrace&) const = default;

private:
    double range_ = 100.0;
    double step_ = 1.0;
    double duration_ = 0.0;
    std::vector<NodePresence> nodes_;
    std::vector<Contact> contacts_;
};

// --- derivation from mobility ---------------------------------------------
//
// Distances are sampled at t = k*step. A run of consecutive in-range samples
// k0..k1 becomes the contact [k0*step - step/2, k1*step + step/2] clipped to
// the pair's joint presence, so that at any instant the contact state equals
// the in-range test at the nearest sample.

inline ContactTrace derive_contacts(const MobilityTrace& trace, double range = 100.0, double step = 1.0) {
    if (!(range > 0.0)) throw ConfigError("contact range must be positive");
    if (!(step > 0.0)) throw ConfigError("sampling step must be positive");

    const auto paths = trace.paths();
    std::vector<NodePresence> nodes;
    nodes.reserve(paths.size());
    for (const auto& p : paths) nodes.push_back({p.id, {p.waypoints.front().time, p.waypoints.back().time}});

    std::vector<std::size_t> by_enter(paths.size());
    std::iota(by_enter.begin(), by_enter.end(), 0);
    std::stable_sort(by_enter.begin(), by_enter.end(), [&](auto x, auto y) {
        return paths[x].waypoints.front().time < paths[y].waypoints.front().time;
    });

    struct Run {
        std::int64_t first;
        std::int64_t last;
    };
    std::unordered_map<std::uint64_t, Run> runs;
    std::vector<Contact> contacts;

    const double half = step / 2.0;
    auto close_run = [&](std::uint64_t key, const Run& r) {
        const NodeId a = node_id(static_cast<std::uint32_t>(key >> 32));
        const NodeId b = node_id(static_cast<std::uint32_t>(key & 0xffffffffULL));
        const auto pa = trace.presence(a);
        const auto pb = trace.presence(b);
        const double lo = std::max(static_cast<double>(r.first) * step - half, std::max(pa.enter, pb.enter));
        const double hi = std::min(static_cast<double>(r.last) * step + half, std::min(pa.leave, pb.leave));
        if (lo < hi) contacts.push_back({a, b, lo, hi});
    };

    const auto samples = static_cast<std::int64_t>(std::floor(trace.duration() / step + 1e-9));
    const Rect& area = trace.bounds();
    std::size_t next = 0;
    std::vector<std::size_t> active;
    struct Placed {
        std::size_t idx;
        Point p;
    };
    std::vector<Placed> placed;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;

    for (std::int64_t k = 0; k <= samples; ++k) {
        const double t = static_cast<double>(k) * step;
        while (next < by_enter.size() && paths[by_enter[next]].waypoints.front().time <= t)
            active.push_back(by_enter[next++]);
        std::erase_if(active, [&](std::size_t i) { return paths[i].waypoints.back().time < t; });

        placed.clear();
        grid.clear();
        for (auto i : active) {
            auto p = MobilityTrace::interpolate(paths[i].waypoints, t);
            if (!p) continue;
            const auto cx = static_cast<std::int64_t>(std::floor((p->x - area.xmin) / range));
            const auto cy = static_cast<std::int64_t>(std::floor((p->y - area.ymin) / range));
            grid[(cx << 32) ^ (cy & 0xffffffff)].push_back(placed.size());
            placed.push_back({i, *p});
        }
        for (std::size_t u = 0; u < placed.size(); ++u) {
            const auto& pu = placed[u];
            const auto cx = static_cast<std::int64_t>(std::floor((pu.p.x - area.xmin) / range));
            const auto cy = static_cast<std::int64_t>(std::floor((pu.p.y - area.ymin) / range));
            for (std::int64_t dx = -1; dx <= 1; ++dx)
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    auto it = grid.find(((cx + dx) << 32) ^ ((cy + dy) & 0xffffffff));
                    if (it == grid.end()) continue;
                    for (auto v : it->second) {
                        if (v <= u) continue;
                        if (distance(pu.p, placed[v].p) > range) continue;
                        const auto key = pair_key(paths[pu.idx].id, paths[placed[v].idx].id);
                        auto [r, fresh] = runs.try_emplace(key, Run{k, k});
                        if (!fresh) r->second.last = k;
                    }
                }
        }
        for (auto it = runs.begin(); it != runs.end();) {
            if (it->second.last < k) {
                close_run(it->first, it->second);
                it = runs.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (const auto& [key, r] : runs) close_run(key, r);
    ContactTrace ct(range, step, std::move(nodes), std::move(contacts));
    return ct;
}

// --- contact CSV -----------------------------------------------------------
//
//   node_a,node_b,start_s,end_s
//
// A row with node_a == node_b declares that node's presence interval. Nodes
// without such a row are present from their first contact start to their
// last contact end. Overlapping or touching contacts of one pair are merged.

inline ContactTrace load_contacts(std::istream& in, double range = 100.0, double step = 1.0) {
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::map<NodeId, Presence> declared;
    std::map<NodeId, Presence> span;
    std::map<std::uint64_t, std::vector<std::pair<double, double>>> per_pair;

    auto widen = [&](NodeId n, double s, double e) {
        auto [it, fresh] = span.try_emplace(n, Presence{s, e});
        if (!fresh) {
            it->second.enter = std::min(it->second.enter, s);
            it->second.leave = std::max(it->second.leave, e);
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (!header_seen) {
            if (text != "node_a,node_b,start_s,end_s")
                throw ParseError("expected header node_a,node_b,start_s,end_s", lineno);
            header_seen = true;
            continue;
        }
        const auto f = detail::split(text);
        if (f.size() != 4) throw ParseError("expected 4 fields", lineno);
        const auto a = detail::parse_uint(f[0]);
        const auto b = detail::parse_uint(f[1]);
        const auto s = detail::parse_double(f[2]);
        const auto e = detail::parse_double(f[3]);
        if (!a || !b || !s || !e) throw ParseError("malformed number", lineno);
        if (*s < 0.0 || !(*e > *s)) throw ParseError("interval must satisfy 0 <= start < end", lineno);
        if (*a == *b) {
            if (!declared.try_emplace(node_id(*a), Presence{*s, *e}).second)
                throw ParseError("presence of node " + std::to_string(*a) + " declared twice", lineno);
            continue;
        }
        per_pair[pair_key(node_id(*a), node_id(*b))].emplace_back(*s, *e);
        widen(node_id(*a), *s, *e);
        widen(node_id(*b), *s, *e);
    }
    if (!header_seen) throw ParseError("missing header", lineno);

    std::vector<NodePresence> nodes;
    for (const auto& [n, p] : declared) nodes.push_back({n, p});
    for (const auto& [n, p] : span)
        if (!declared.contains(n)) nodes.push_back({n, p});

    std::vector<Contact> contacts;
    for (auto& [key, iv] : per_pair) {
        std::sort(iv.begin(), iv.end());
        const NodeId a = node_id(static_cast<std::uint32_t>(key >> 32));
        const NodeId b = node_id(static_cast<std::uint32_t>(key & 0xffffffffULL));
        double s = iv.front().first;
        double e = iv.front().second;
        for (std::size_t i = 1; i < iv.size(); ++i) {
            if (iv[i].first <= e) {
                e = std::max(e, iv[i].second);
            } else {
                contacts.push_back({a, b, s, e});
                s = iv[i].first;
                e = iv[i].second;
            }
        }
        contacts.push_back({a, b, s, e});
    }
    return ContactTrace(range, step, std::move(nodes), std::move(contacts));
}

inline void write_contacts(std::ostream& out, const ContactTrace& ct) {
    using detail::format_double;
    out << "node_a,node_b,start_s,end_s\n";
    for (const auto& n : ct.nodes())
        out << raw(n.id) << ',' << raw(n.id) << ',' << format_double(n.presence.enter) << ','
            << format_double(n.presence.leave) << '\n';
    for (const auto& c : ct.contacts())
        out << raw(c.a) << ',' << raw(c.b) << ',' << format_double(c.start) << ','
            << format_double(c.end) << '\n';
}

inline ContactTrace subsample(const ContactTrace& ct, double p, std::uint64_t seed) {
    check_fraction(p);
    return ct.filter([&](NodeId n) { return retained(n, p, seed); });
}

// --- connectivity snapshots -----------------------------------------------

struct ConnectivitySnapshot {
    double time = 0.0;
    std::vector<NodeId> nodes;                        // sorted
    std::vector<std::pair<NodeId, NodeId>> edges;     // first < second, sorted
};

// Nodes present at t (enter <= t < leave) and contacts active at t
// (start <= t < end).
inline ConnectivitySnapshot snapshot(const ContactTrace& ct, double t) {
    ConnectivitySnapshot g;
    g.time = t;
    for (const auto& n : ct.nodes())
        if (n.presence.enter <= t && t < n.presence.leave) g.nodes.push_back(n.id);
    for (const auto& c : ct.contacts()) {
        if (c.start > t) break;
        if (t < c.end) g.edges.emplace_back(c.a, c.b);
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

using Partition = std::vector<std::vector<NodeId>>;

// Components sorted internally; components ordered by smallest member.
inline Partition connected_components(std::span<const NodeId> nodes,
                                      std::span<const std::pair<NodeId, NodeId>> edges) {
    std::vector<NodeId> ids(nodes.begin(), nodes.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto index = [&](NodeId n) -> std::optional<std::size_t> {
        auto it = std::lower_bound(ids.begin(), ids.end(), n);
        if (it == ids.end() || *it != n) return std::nullopt;
        return static_cast<std::size_t>(it - ids.begin());
    };
    DisjointSets ds(ids.size());
    for (const auto& [a, b] : edges) {
        auto ia = index(a);
        auto ib = index(b);
        if (ia && ib) ds.unite(*ia, *ib);
    }
    std::map<std::size_t, std::vector<NodeId>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) groups[ds.find(i)].push_back(ids[i]);
    Partition out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return out;
}

inline Partition connected_components(const ConnectivitySnapshot& g) {
    return connected_components(g.nodes, g.edges);
}

// --- dataset statistics ----------------------------------------------------

struct CcdfPoint {
    double seconds = 0.0;
    double fraction = 0.0;
    bool operator==(const CcdfPoint&) const = default;
};

struct DatasetStats {
    double avg_nodes = 0.0;
    double avg_components = 0.0;
    double avg_singletons = 0.0;
    double avg_component_size = 0.0;  // node-time / component-time
    double avg_degree = 0.0;          // 2 * edge-time / node-time
    std::size_t samples = 0;
    std::vector<CcdfPoint> contact_duration_ccdf;
    std::vector<std::pair<NodeId, std::optional<double>>> time_to_first_contact;
};

// Fraction of contacts lasting strictly longer than each observed duration,
// preceded by (0, 1).
inline std::vector<CcdfPoint> contact_duration_ccdf(std::span<const Contact> contacts) {
    std::vector<double> d;
    d.reserve(contacts.size());
    for (const auto& c : contacts) d.push_back(c.duration());
    std::sort(d.begin(), d.end());
    std::vector<CcdfPoint> out;
    if (d.empty()) return out;
    const auto n = static_cast<double>(d.size());
    out.push_back({0.0, 1.0});
    for (std::size_t i = 0; i < d.size();) {
        std::size_t j = i;
        while (j < d.size() && d[j] == d[i]) ++j;
        out.push_back({d[i], static_cast<double>(d.size() - j) / n});
        i = j;
    }
    return out;
}

// Averages over samples t = k*step, 0 <= t < duration.
inline DatasetStats dataset_stats(const ContactTrace& ct, double step = 1.0) {
    if (!(step > 0.0)) throw ConfigError("sampling step must be positive");
    DatasetStats s;
    const auto nodes = ct.nodes();
    const auto contacts = ct.contacts();

    auto index_of = [&](NodeId n) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), n,
                                   [](const NodePresence& p, NodeId v) { return p.id < v; });
        return static_cast<std::size_t>(it - nodes.begin());
    };

    struct Change {
        double time;
        int kind;  // 0 node leave, 1 edge down, 2 node enter, 3 edge up
        std::size_t a, b;
    };
    std::vector<Change> changes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i].presence.enter < nodes[i].presence.leave)) continue;
        changes.push_back({nodes[i].presence.enter, 2, i, i});
        changes.push_back({nodes[i].presence.leave, 0, i, i});
    }
    for (const auto& c : contacts) {
        changes.push_back({c.start, 3, index_of(c.a), index_of(c.b)});
        changes.push_back({c.end, 1, index_of(c.a), index_of(c.b)});
    }
    std::sort(changes.begin(), changes.end(),
              [](const Change& x, const Change& y) { return std::tie(x.time, x.kind) < std::tie(y.time, y.kind); });

    std::vector<char> present(nodes.size(), 0);
    std::vector<std::size_t> degree(nodes.size(), 0);
    std::map<std::uint64_t, std::pair<std::size_t, std::size_t>> edges;
    std::size_t present_count = 0;

    double node_time = 0.0, comp_time = 0.0, single_time = 0.0, edge_time = 0.0;
    std::size_t ci = 0;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * step;
        if (!(t < ct.duration())) break;
        for (; ci < changes.size() && changes[ci].time <= t; ++ci) {
            const auto& c = changes[ci];
            const auto key = (static_cast<std::uint64_t>(c.a) << 32) | c.b;
            switch (c.kind) {
                case 0: present[c.a] = 0; --present_count; break;
                case 1: edges.erase(key); --degree[c.a]; --degree[c.b]; break;
                case 2: present[c.a] = 1; ++present_count; break;
                case 3: edges.emplace(key, std::pair{c.a, c.b}); ++degree[c.a]; ++degree[c.b]; break;
            }
        }
        DisjointSets ds(nodes.size());
        std::size_t components = present_count;
        for (const auto& [key, e] : edges)
            if (ds.unite(e.first, e.second)) --components;
        std::size_t singles = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (present[i] && degree[i] == 0) ++singles;
        node_time += static_cast<double>(present_count);
        comp_time += static_cast<double>(components);
        single_time += static_cast<double>(singles);
        edge_time += static_cast<double>(edges.size());
        ++s.samples;
    }
    if (s.samples > 0) {
        const auto n = static_cast<double>(s.samples);
        s.avg_nodes = node_time / n;
        s.avg_components = comp_time / n;
        s.avg_singletons = single_time / n;
        s.avg_component_size = comp_time > 0.0 ? node_time / comp_time : 0.0;
        s.avg_degree = node_time > 0.0 ? 2.0 * edge_time / node_time : 0.0;
    }
    s.contact_duration_ccdf = contact_duration_ccdf(contacts);

    std::vector<std::optional<double>> first(nodes.size());
    for (const auto& c : contacts)
        for (auto idx : {index_of(c.a), index_of(c.b)})
            if (!first[idx]) first[idx] = c.start - nodes[idx].presence.enter;
    for (std::size_t i = 0; i < nodes.size(); ++i) s.time_to_first_contact.emplace_back(nodes[i].id, first[i]);
    return s;
}

}  // namespace pnt
