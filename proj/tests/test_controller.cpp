#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace pnt;
using namespace std::chrono_literals;

namespace {

ControlMessage enter(std::uint32_t n, double t) {
    return {ControlKind::enter, node_id(n), from_seconds(t), 0, {}, {}};
}
ControlMessage ack(std::uint32_t n, std::uint32_t msg) { return {ControlKind::ack, node_id(n), Time{0}, msg, {}, {}}; }
ControlMessage gps(std::uint32_t n, double x, double y) {
    return {ControlKind::gps_report, node_id(n), Time{0}, 0, {x, y}, {}};
}

ControllerState with_nodes(std::initializer_list<std::pair<std::uint32_t, double>> entries) {
    ControllerState s;
    for (auto [n, t] : entries) handle_control(s, enter(n, t), from_seconds(t));
    return s;
}

}  // namespace

TEST(Objective, ClosedFormsAtSampledPoints) {
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        EXPECT_EQ(objective_value(WhenStrategy::single_copy, x), 0.0);
        EXPECT_EQ(objective_value(WhenStrategy::ten_copies, x), 0.0);
        EXPECT_EQ(objective_value(WhenStrategy::quadratic, x), x * x);
        EXPECT_EQ(objective_value(WhenStrategy::linear, x), x);
        EXPECT_EQ(objective_value(WhenStrategy::square_root, x), std::sqrt(x));
        EXPECT_EQ(objective_value(WhenStrategy::slow_linear, x), x <= 0.5 ? 0.5 * x : 1.5 * x - 0.5);
        EXPECT_EQ(objective_value(WhenStrategy::fast_linear, x), x <= 0.5 ? 1.5 * x : 0.5 * x + 0.5);
    }
    EXPECT_THROW(objective_value(WhenStrategy::linear, 1.5), Error);
    EXPECT_THROW(objective_value(WhenStrategy::linear, -0.1), Error);
}

TEST(Objective, CurvesMonotoneAndReachOne) {
    for (auto w : kWhenStrategies) {
        if (!is_curve(w)) continue;
        EXPECT_EQ(objective_value(w, 1.0), 1.0) << name(w);
        EXPECT_EQ(objective_value(w, 0.0), 0.0) << name(w);
        double prev = 0.0;
        for (int i = 1; i <= 1000; ++i) {
            const double v = objective_value(w, i / 1000.0);
            EXPECT_GE(v, prev) << name(w);
            prev = v;
        }
    }
}

TEST(Strategies, NamesRoundTrip) {
    for (auto w : kWhenStrategies) EXPECT_EQ(parse_when(name(w)), w);
    for (auto w : kWhomStrategies) EXPECT_EQ(parse_whom(name(w)), w);
    EXPECT_FALSE(parse_when("cubic"));
    EXPECT_FALSE(parse_whom("nearest"));
}

TEST(ControlState, EnterLeaveAck) {
    auto s = with_nodes({{1, 0}, {2, 5}});
    s.begin_message(3);
    handle_control(s, ack(1, 3), Time{0});
    EXPECT_TRUE(s.acked.contains(node_id(1)));
    handle_control(s, ack(2, 2), Time{0});
    EXPECT_EQ(s.stale_acks, 1U);
    handle_control(s, ack(9, 3), Time{0});
    EXPECT_EQ(s.anomalies, 1U);
    handle_control(s, {ControlKind::leave, node_id(1), Time{0}, 0, {}, {}}, Time{0});
    EXPECT_FALSE(s.subscribed.contains(node_id(1)));
    EXPECT_FALSE(s.acked.contains(node_id(1)));
    // A late ACK from a departed node is not an anomaly.
    handle_control(s, ack(1, 3), Time{0});
    EXPECT_EQ(s.anomalies, 1U);
    EXPECT_FALSE(s.acked.contains(node_id(1)));
}

TEST(CopiesNeeded, CurveShortfall) {
    auto s = with_nodes({{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}, {7, 0}, {8, 0}, {9, 0}, {10, 0}});
    EXPECT_EQ(copies_needed(s, WhenStrategy::linear, 0.35, false), 4U);  // ceil(3.5)
    s.acked.insert(node_id(1));
    s.pending.insert(node_id(2));
    EXPECT_EQ(copies_needed(s, WhenStrategy::linear, 0.35, false), 2U);
    EXPECT_EQ(copies_needed(s, WhenStrategy::linear, 0.1, false), 0U);
    EXPECT_EQ(copies_needed(s, WhenStrategy::quadratic, 0.5, false), 1U);  // ceil(2.5) - 2
}

TEST(CopiesNeeded, PushAndWaitOnlyAtFirstDecision) {
    auto s = with_nodes({{1, 0}, {2, 0}, {3, 0}});
    EXPECT_EQ(copies_needed(s, WhenStrategy::single_copy, 0.0, true), 1U);
    EXPECT_EQ(copies_needed(s, WhenStrategy::ten_copies, 0.0, true), 3U);
    EXPECT_EQ(copies_needed(s, WhenStrategy::ten_copies, 0.5, false), 0U);
}

TEST(Selection, RandomDistinctCandidates) {
    auto s = with_nodes({{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
    s.acked.insert(node_id(2));
    Rng rng(1);
    SelectionContext ctx{&rng, {0, 0, 10, 10}};
    for (int i = 0; i < 50; ++i) {
        auto t = select_targets(s, WhomStrategy::random, 3, ctx);
        std::set<NodeId> u(t.begin(), t.end());
        EXPECT_EQ(u.size(), 3U);
        EXPECT_FALSE(u.contains(node_id(2)));
    }
    EXPECT_EQ(select_targets(s, WhomStrategy::random, 10, ctx).size(), 4U);
}

TEST(Selection, EntryOrders) {
    auto s = with_nodes({{1, 10}, {2, 40}, {3, 20}, {4, 30}});
    Rng rng(1);
    SelectionContext ctx{&rng, {}};
    EXPECT_EQ(select_targets(s, WhomStrategy::entry_oldest, 2, ctx), (std::vector<NodeId>{node_id(1), node_id(3)}));
    EXPECT_EQ(select_targets(s, WhomStrategy::entry_newest, 2, ctx), (std::vector<NodeId>{node_id(2), node_id(4)}));
    // Mean entry 25: distances 15, 15, 5, 5.
    EXPECT_EQ(select_targets(s, WhomStrategy::entry_average, 3, ctx),
              (std::vector<NodeId>{node_id(3), node_id(4), node_id(1)}));
}

TEST(Selection, DensityPicksCrowdedLeafFirst) {
    auto s = with_nodes({{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}});
    handle_control(s, gps(1, 10, 10), Time{0});
    handle_control(s, gps(2, 11, 10), Time{0});
    handle_control(s, gps(3, 900, 900), Time{0});
    handle_control(s, gps(4, 10.5, 11), Time{0});
    Rng rng(1);
    SelectionContext ctx{&rng, {0, 0, 1000, 1000}};
    const auto t = select_targets(s, WhomStrategy::gps_density, 5, ctx);
    ASSERT_EQ(t.size(), 5U);
    EXPECT_EQ(t.back(), node_id(5));  // never reported a position
    EXPECT_EQ(t[3], node_id(3));      // alone in a big cell
}

TEST(Selection, PotentialMatchesDirectSummation) {
    Rng rng(8);
    const Rect area{0, 0, 1000, 800};
    for (int trial = 0; trial < 50; ++trial) {
        ControllerState s;
        std::vector<Point> infected;
        std::map<NodeId, Point> where;
        const auto n = 5 + rng.below(30);
        for (std::uint32_t i = 0; i < n; ++i) {
            handle_control(s, enter(i, 0), Time{0});
            const Point p{rng.uniform(1, 999), rng.uniform(1, 799)};
            handle_control(s, gps(i, p.x, p.y), Time{0});
            where[node_id(i)] = p;
            if (rng.uniform() < 0.3) {
                s.acked.insert(node_id(i));
                infected.push_back(p);
            }
        }
        SelectionContext ctx{&rng, area};
        const auto got = select_targets(s, WhomStrategy::gps_potential, n, ctx);
        std::vector<std::pair<double, NodeId>> want;
        for (auto c : s.candidates()) want.emplace_back(oracle::direct_potential(where[c], infected, area), c);
        std::sort(want.begin(), want.end());
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            const double v = coulomb_potential(where[got[i]], infected, area);
            EXPECT_NEAR(v, want[i].first, 1e-9);
        }
    }
}

TEST(Selection, ComponentsCoverCleanComponentsFirst) {
    auto s = with_nodes({{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}});
    // Components {1,2,3} (3 infected), {4,5}, {6}.
    s.last_neighbors[node_id(1)] = {{node_id(2)}, Time{0}};
    s.last_neighbors[node_id(2)] = {{node_id(1), node_id(3)}, Time{0}};
    s.last_neighbors[node_id(4)] = {{node_id(5)}, Time{0}};
    s.acked.insert(node_id(3));
    Rng rng(4);
    SelectionContext ctx{&rng, {}};
    const auto t = select_targets(s, WhomStrategy::connected_components, 3, ctx);
    ASSERT_EQ(t.size(), 3U);
    EXPECT_TRUE(t[0] == node_id(4) || t[0] == node_id(5));
    EXPECT_EQ(t[1], node_id(6));
    EXPECT_TRUE(t[2] == node_id(1) || t[2] == node_id(2));
}

TEST(Tick, MarksTargetsPendingAndPanicTakesTheRest) {
    auto s = with_nodes({{1, 0}, {2, 0}, {3, 0}, {4, 0}});
    s.begin_message(0);
    ContentMessage msg;
    msg.created = Time{0};
    msg.expires = 100s;
    ControllerConfig cfg;
    cfg.when = WhenStrategy::linear;
    Rng rng(2);
    SelectionContext ctx{&rng, {}};
    const auto t = tick(s, cfg, msg, 50s, ctx);
    EXPECT_EQ(t.size(), 2U);
    EXPECT_EQ(s.pending.size(), 2U);
    EXPECT_TRUE(tick(s, cfg, msg, 50s, ctx).empty());
    const auto p = panic(s);
    EXPECT_EQ(p.size(), 2U);
    EXPECT_TRUE(s.candidates().empty());
}

TEST(Tick, SingleCopyOnlyAtFirstDecision) {
    auto s = with_nodes({{1, 0}, {2, 0}});
    ContentMessage msg;
    msg.created = 10s;
    msg.expires = 70s;
    ControllerConfig cfg;
    cfg.when = WhenStrategy::single_copy;
    Rng rng(2);
    SelectionContext ctx{&rng, {}};
    EXPECT_EQ(tick(s, cfg, msg, 11s, ctx).size(), 1U);
    EXPECT_TRUE(tick(s, cfg, msg, 31s, ctx).empty());
}
