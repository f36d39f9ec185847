#pragma once

// Node mobility: who is present when, and where.
//
// A trace stores, for every node, a time-ordered list of waypoints. A node is
// present from its first to its last waypoint, and its position in between
// is the linear interpolation of the bracketing waypoints.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "detail/csv.hpp"

namespace pnt {

struct Waypoint {
    double time = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Waypoint&) const = default;
};

struct Presence {
    double enter = 0.0;
    double leave = 0.0;
    bool operator==(const Presence&) const = default;
};

struct NodePath {
    NodeId id{};
    std::vector<Waypoint> waypoints;
    bool operator==(const NodePath&) const = default;
};

class MobilityTrace {
public:
    MobilityTrace() = default;

    // Validates every invariant; throws Error naming the offending node.
    MobilityTrace(Rect bounds, std::vector<NodePath> paths, double declared_duration = 0.0)
        : bounds_(bounds), paths_(std::move(paths)) {
        std::sort(paths_.begin(), paths_.end(),
                  [](const NodePath& a, const NodePath& b) { return a.id < b.id; });
        duration_ = declared_duration;
        for (std::size_t i = 0; i < paths_.size(); ++i) {
            const auto& p = paths_[i];
            if (i > 0 && paths_[i - 1].id == p.id)
                throw Error("duplicate node " + to_string(p.id));
            if (p.waypoints.empty()) throw Error("node " + to_string(p.id) + " has no waypoints");
            for (std::size_t k = 0; k < p.waypoints.size(); ++k) {
                const auto& w = p.waypoints[k];
                if (w.time < 0.0) throw Error("node " + to_string(p.id) + " has a negative time");
                if (k > 0 && !(w.time > p.waypoints[k - 1].time))
                    throw Error("node " + to_string(p.id) + " waypoint times do not strictly increase");
                if (!bounds_.contains({w.x, w.y}))
                    throw Error("node " + to_string(p.id) + " waypoint outside area bounds");
            }
            duration_ = std::max(duration_, p.waypoints.back().time);
        }
    }

    const Rect& bounds() const noexcept { return bounds_; }
    double duration() const noexcept { return duration_; }
    std::size_t node_count() const noexcept { return paths_.size(); }
    std::span<const NodePath> paths() const noexcept { return paths_; }

    std::vector<NodeId> nodes() const {
        std::vector<NodeId> out;
        out.reserve(paths_.size());
        for (const auto& p : paths_) out.push_back(p.id);
        return out;
    }

    bool contains(NodeId n) const noexcept { return find(n) != nullptr; }

    const NodePath& path(NodeId n) const {
        const auto* p = find(n);
        if (p == nullptr) throw Error("unknown node " + to_string(n));
        return *p;
    }

    Presence presence(NodeId n) const {
        const auto& w = path(n).waypoints;
        return {w.front().time, w.back().time};
    }

    // Absent outside the node's presence interval.
    std::optional<Point> position_at(NodeId n, double t) const {
        return interpolate(path(n).waypoints, t);
    }

    static std::optional<Point> interpolate(std::span<const Waypoint> w, double t) {
        if (w.empty() || t < w.front().time || t > w.back().time) return std::nullopt;
        auto hi = std::upper_bound(w.begin(), w.end(), t,
                                   [](double v, const Waypoint& p) { return v < p.time; });
        if (hi == w.end()) return Point{w.back().x, w.back().y};
        auto lo = hi - 1;
        if (lo->time == t) return Point{lo->x, lo->y};
        const double f = (t - lo->time) / (hi->time - lo->time);
        return Point{lo->x + f * (hi->x - lo->x), lo->y + f * (hi->y - lo->y)};
    }

    bool operator==(const MobilityTrace&) const = default;

private:
    const NodePath* find(NodeId n) const noexcept {
        auto it = std::lower_bound(paths_.begin(), paths_.end(), n,
                                   [](const NodePath& p, NodeId v) { return p.id < v; });
        return (it != paths_.end() && it->id == n) ? &*it : nullptr;
    }

    Rect bounds_{};
    double duration_ = 0.0;
    std::vector<NodePath> paths_;
};

// --- waypoint CSV ---------------------------------------------------------
//
//   # bounds,xmin,ymin,xmax,ymax      (optional; inferred from data if absent)
//   # duration,seconds                (optional)
//   node_id,time_s,x_m,y_m
//   0,0,10.5,20
//   ...

enum class TraceFormat { waypoint_csv };

inline MobilityTrace load_trace(std::istream& in, TraceFormat format = TraceFormat::waypoint_csv) {
    (void)format;
    std::optional<Rect> bounds;
    double declared_duration = 0.0;
    bool header_seen = false;
    std::map<NodeId, std::vector<Waypoint>> paths;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            const auto fields = detail::split(detail::trim(text.substr(1)));
            if (fields.empty()) continue;
            if (fields[0] == "bounds") {
                if (fields.size() != 5) throw ParseError("bounds line needs 4 values", lineno);
                double v[4];
                for (int i = 0; i < 4; ++i) {
                    auto d = detail::parse_double(fields[i + 1]);
                    if (!d) throw ParseError("bad bounds value", lineno);
                    v[i] = *d;
                }
                if (!(v[2] > v[0]) || !(v[3] > v[1])) throw ParseError("empty bounds", lineno);
                bounds = Rect{v[0], v[1], v[2], v[3]};
            } else if (fields[0] == "duration" && fields.size() == 2) {
                auto d = detail::parse_double(fields[1]);
                if (!d || *d < 0.0) throw ParseError("bad duration", lineno);
                declared_duration = *d;
            }
            continue;
        }
        if (!header_seen) {
            if (text != "node_id,time_s,x_m,y_m")
                throw ParseError("expected header node_id,time_s,x_m,y_m", lineno);
            header_seen = true;
            continue;
        }
        const auto f = detail::split(text);
        if (f.size() != 4) throw ParseError("expected 4 fields", lineno);
        const auto id = detail::parse_uint(f[0]);
        const auto t = detail::parse_double(f[1]);
        const auto x = detail::parse_double(f[2]);
        const auto y = detail::parse_double(f[3]);
        if (!id || !t || !x || !y) throw ParseError("malformed number", lineno);
        if (*t < 0.0) throw ParseError("negative time", lineno);
        auto& w = paths[node_id(*id)];
        if (!w.empty() && !(*t > w.back().time))
            throw ParseError("node " + std::to_string(*id) + ": time " + detail::format_double(*t) +
                                 " does not follow " + detail::format_double(w.back().time),
                             lineno);
        if (bounds && !bounds->contains({*x, *y}))
            throw ParseError("node " + std::to_string(*id) + ": waypoint outside bounds", lineno);
        w.push_back({*t, *x, *y});
    }
    if (!header_seen) throw ParseError("missing header", lineno);

    if (!bounds) {
        Rect r{0, 0, 0, 0};
        bool first = true;
        for (const auto& [id, w] : paths)
            for (const auto& p : w) {
                if (first) {
                    r = {p.x, p.y, p.x, p.y};
                    first = false;
                }
                r.xmin = std::min(r.xmin, p.x);
                r.ymin = std::min(r.ymin, p.y);
                r.xmax = std::max(r.xmax, p.x);
                r.ymax = std::max(r.ymax, p.y);
            }
        bounds = r;
    }

    std::vector<NodePath> out;
    out.reserve(paths.size());
    for (auto& [id, w] : paths) out.push_back({id, std::move(w)});
    return MobilityTrace(*bounds, std::move(out), declared_duration);
}

inline void write_trace(std::ostream& out, const MobilityTrace& trace) {
    using detail::format_double;
    const auto& b = trace.bounds();
    out << "# bounds," << format_double(b.xmin) << ',' << format_double(b.ymin) << ','
        << format_double(b.xmax) << ',' << format_double(b.ymax) << '\n';
    out << "# duration," << format_double(trace.duration()) << '\n';
    out << "node_id,time_s,x_m,y_m\n";
    for (const auto& p : trace.paths())
        for (const auto& w : p.waypoints)
            out << raw(p.id) << ',' << format_double(w.time) << ',' << format_double(w.x) << ','
                << format_double(w.y) << '\n';
}

// --- synthetic traces -----------------------------------------------------

struct SyntheticConfig {
    Rect area{0, 0, 1500, 1500};
    double arrival_rate = 0.5;     // nodes per second
    double mean_transit = 600.0;   // seconds
    double speed_min = 5.0;        // m/s
    double speed_max = 15.0;
    std::uint32_t waypoints_min = 1;
    std::uint32_t waypoints_max = 4;
    double horizon = 3600.0;       // seconds
    double warmup = 0.0;           // arrivals start at -warmup so the area is populated at t=0

    void validate() const {
        if (!(area.width() > 0.0) || !(area.height() > 0.0)) throw ConfigError("area must be non-empty");
        if (!(arrival_rate > 0.0)) throw ConfigError("arrival rate must be positive");
        if (!(mean_transit > 0.0)) throw ConfigError("mean transit must be positive");
        if (!(speed_min > 0.0) || speed_max < speed_min || speed_max > 50.0)
            throw ConfigError("speed range must lie within (0, 50] m/s");
        if (waypoints_max < waypoints_min) throw ConfigError("empty waypoint count range");
        if (horizon < 0.0) throw ConfigError("horizon must be non-negative");
        if (warmup < 0.0) throw ConfigError("warmup must be non-negative");
    }
};

namespace detail {

inline Point random_boundary_point(const Rect& a, Rng& rng) {
    const double w = a.width();
    const double h = a.height();
    double s = rng.uniform() * 2.0 * (w + h);
    if (s < w) return {a.xmin + s, a.ymin};
    s -= w;
    if (s < h) return {a.xmax, a.ymin + s};
    s -= h;
    if (s < w) return {a.xmax - s, a.ymax};
    s -= w;
    return {a.xmin, a.ymax - s};
}

inline Point random_interior_point(const Rect& a, Rng& rng) {
    return {rng.uniform(a.xmin, a.xmax), rng.uniform(a.ymin, a.ymax)};
}

}  // namespace detail

// Poisson arrivals; each node enters at a boundary point, visits a random
// number of interior waypoints, heads for a boundary exit and keeps roaming
// if its exponentially distributed transit time is not yet used up. The
// trajectory is cut at the transit time and clipped to [0, horizon].
inline MobilityTrace generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    std::vector<NodePath> paths;
    std::uint32_t next_id = 0;
    double arrival = -cfg.warmup;
    const auto& area = cfg.area;

    while (true) {
        arrival += rng.exponential(1.0 / cfg.arrival_rate);
        if (arrival >= cfg.horizon) break;
        const double transit = rng.exponential(cfg.mean_transit);
        const double leave = std::min(arrival + transit, cfg.horizon);
        const std::uint32_t interior =
            cfg.waypoints_min +
            static_cast<std::uint32_t>(rng.below(cfg.waypoints_max - cfg.waypoints_min + 1ULL));

        std::vector<Waypoint> corners;
        Point pos = detail::random_boundary_point(area, rng);
        double t = arrival;
        corners.push_back({t, pos.x, pos.y});
        std::uint32_t leg = 0;
        while (t < leave) {
            Point target = leg < interior    ? detail::random_interior_point(area, rng)
                           : leg == interior ? detail::random_boundary_point(area, rng)
                                             : detail::random_interior_point(area, rng);
            ++leg;
            const double len = distance(pos, target);
            if (len <= 0.0) continue;
            const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);
            t += len / speed;
            pos = target;
            corners.push_back({t, pos.x, pos.y});
        }

        // Clip to [max(arrival, 0), leave].
        const double start = std::max(arrival, 0.0);
        if (!(leave > start)) continue;
        std::vector<Waypoint> w;
        auto at = [&](double time) {
            auto p = MobilityTrace::interpolate(corners, time);
            return Waypoint{time, p->x, p->y};
        };
        w.push_back(at(start));
        for (const auto& c : corners)
            if (c.time > start && c.time < leave) w.push_back(c);
        w.push_back(at(leave));
        paths.push_back({node_id(next_id++), std::move(w)});
    }
    return MobilityTrace(area, std::move(paths), cfg.horizon);
}

// --- participation --------------------------------------------------------

// Per-node Bernoulli retention. The decision for a node depends only on
// (seed, node id), so the same nodes are kept whether the input is a
// mobility trace or a contact trace.
inline bool retained(NodeId n, double p, std::uint64_t seed) noexcept {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(0x5eed0000ULL + raw(n)));
    return static_cast<double>(h >> 11) * 0x1.0p-53 < p;
}

inline void check_fraction(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("participation must lie in [0, 1]");
}

inline MobilityTrace subsample(const MobilityTrace& trace, double p, std::uint64_t seed) {
    check_fraction(p);
    std::vector<NodePath> kept;
    for (const auto& path : trace.paths())
        if (retained(path.id, p, seed)) kept.push_back(path);
    return MobilityTrace(trace.bounds(), std::move(kept), trace.duration());
}

}  // namespace pnt
