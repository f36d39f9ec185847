#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace pnt;

namespace {

NodePresence present(std::uint32_t id, double enter, double leave) { return {node_id(id), {enter, leave}}; }
Contact contact(std::uint32_t a, std::uint32_t b, double s, double e) { return {node_id(a), node_id(b), s, e}; }

// Six nodes over ten seconds; statistics below were worked out by hand,
// sample by sample at t = 0..9.
ContactTrace six_nodes() {
    return ContactTrace(100, 1,
                        {present(1, 0, 10), present(2, 0, 10), present(3, 0, 10), present(4, 0, 10),
                         present(5, 0, 5), present(6, 5, 10)},
                        {contact(1, 2, 0, 10), contact(2, 3, 2, 6), contact(4, 5, 1, 3), contact(4, 6, 6, 8)});
}

MobilityTrace two_walkers() {
    // Node 0 parked at the origin; node 1 walks along x at 10 m/s from x=300.
    return MobilityTrace(Rect{0, 0, 1000, 1000},
                         {{node_id(0), {{0, 0, 0}, {60, 0, 0}}}, {node_id(1), {{0, 300, 0}, {60, 900, 0}}}}, 60);
}

}  // namespace

TEST(ContactTrace, ValidatesContacts) {
    EXPECT_THROW(ContactTrace(100, 1, {present(1, 0, 10), present(2, 0, 10)}, {contact(1, 2, 5, 5)}), Error);
    EXPECT_THROW(ContactTrace(100, 1, {present(1, 0, 10), present(2, 3, 10)}, {contact(1, 2, 2, 5)}), Error);
    EXPECT_THROW(ContactTrace(100, 1, {present(1, 0, 10), present(2, 0, 10)},
                              {contact(1, 2, 1, 3), contact(1, 2, 3, 4)}),
                 Error);
    EXPECT_THROW(ContactTrace(100, 1, {present(1, 0, 10)}, {contact(1, 1, 1, 3)}), Error);
    const ContactTrace ok(100, 1, {present(1, 0, 10), present(2, 0, 10)}, {contact(2, 1, 1, 3)});
    EXPECT_EQ(ok.contacts().front().a, node_id(1));
}

TEST(DeriveContacts, NearestSampleIntervals) {
    const auto ct = derive_contacts(two_walkers(), 100, 1);
    // x1(t) = 300 + 10t stays out of range.
    EXPECT_TRUE(ct.contacts().empty());

    const MobilityTrace meet(Rect{0, 0, 1000, 1000},
                             {{node_id(0), {{0, 0, 0}, {60, 0, 0}}}, {node_id(1), {{0, 300, 0}, {60, 0, 0}}}}, 60);
    // x1(t) = 300 - 5t; in range for t >= 40, i.e. samples 40..60.
    const auto c2 = derive_contacts(meet, 100, 1);
    ASSERT_EQ(c2.contacts().size(), 1U);
    EXPECT_DOUBLE_EQ(c2.contacts()[0].start, 39.5);
    EXPECT_DOUBLE_EQ(c2.contacts()[0].end, 60.0);  // clipped to presence
}

TEST(DeriveContacts, MatchesFineSampler) {
    SyntheticConfig cfg;
    cfg.area = {0, 0, 600, 600};
    cfg.arrival_rate = 0.2;
    cfg.mean_transit = 120;
    cfg.horizon = 200;
    cfg.warmup = 100;
    Rng probe(77);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto mt = generate_synthetic(cfg, seed);
        const auto ct = derive_contacts(mt, 100, 1);
        const auto ids = mt.nodes();
        for (int trial = 0; trial < 300; ++trial) {
            const double t = probe.uniform(0.0, cfg.horizon);
            const double ts = std::round(t);
            const auto g = snapshot(ct, t);
            for (std::size_t i = 0; i < ids.size(); ++i)
                for (std::size_t j = i + 1; j < ids.size(); ++j) {
                    const auto pa = mt.presence(ids[i]);
                    const auto pb = mt.presence(ids[j]);
                    const bool both_now = pa.enter <= t && t < pa.leave && pb.enter <= t && t < pb.leave;
                    const auto xa = mt.position_at(ids[i], ts);
                    const auto xb = mt.position_at(ids[j], ts);
                    if (!both_now || !xa || !xb) continue;
                    const bool want = distance(*xa, *xb) <= 100.0;
                    const bool got = std::binary_search(g.edges.begin(), g.edges.end(), std::pair{ids[i], ids[j]});
                    ASSERT_EQ(got, want) << "seed " << seed << " t " << t << " pair " << raw(ids[i]) << "-"
                                         << raw(ids[j]);
                }
        }
    }
}

TEST(ContactCsv, LoadsPresenceRowsAndMergesOverlaps) {
    std::istringstream in(
        "node_a,node_b,start_s,end_s\n"
        "1,1,0,50\n"
        "1,2,5,10\n"
        "2,1,8,12\n"
        "2,3,20,30\n");
    const auto ct = load_contacts(in);
    ASSERT_EQ(ct.contacts().size(), 2U);
    EXPECT_EQ(ct.contacts()[0], contact(1, 2, 5, 12));
    EXPECT_EQ(*ct.find(node_id(1)), (Presence{0, 50}));
    EXPECT_EQ(*ct.find(node_id(2)), (Presence{5, 30}));
    EXPECT_EQ(*ct.find(node_id(3)), (Presence{20, 30}));
}

TEST(ContactCsv, RoundTrip) {
    const auto ct = six_nodes();
    std::ostringstream out;
    write_contacts(out, ct);
    std::istringstream in(out.str());
    const auto back = load_contacts(in);
    EXPECT_TRUE(std::equal(back.contacts().begin(), back.contacts().end(), ct.contacts().begin(),
                           ct.contacts().end()));
    EXPECT_TRUE(std::equal(back.nodes().begin(), back.nodes().end(), ct.nodes().begin(), ct.nodes().end()));
}

TEST(ContactCsv, ReportsLineOfBadRow) {
    std::istringstream in("node_a,node_b,start_s,end_s\n1,2,5,10\n1,2,9,x\n");
    try {
        load_contacts(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3U);
    }
}

TEST(Participation, SameNodesInMobilityAndContacts) {
    SyntheticConfig cfg;
    cfg.area = {0, 0, 600, 600};
    cfg.arrival_rate = 0.3;
    cfg.horizon = 300;
    cfg.warmup = 200;
    const auto mt = generate_synthetic(cfg, 8);
    const auto ct = derive_contacts(mt);
    const auto a = subsample(ct, 0.3, 21);
    const auto b = derive_contacts(subsample(mt, 0.3, 21));
    ASSERT_EQ(a.nodes().size(), b.nodes().size());
    EXPECT_TRUE(std::equal(a.contacts().begin(), a.contacts().end(), b.contacts().begin(), b.contacts().end()));
}

TEST(Snapshot, HalfOpenIntervals) {
    const auto ct = six_nodes();
    auto g = snapshot(ct, 3.0);
    EXPECT_EQ(g.edges, (std::vector<std::pair<NodeId, NodeId>>{{node_id(1), node_id(2)}, {node_id(2), node_id(3)}}));
    g = snapshot(ct, 5.0);
    EXPECT_EQ(g.nodes, (std::vector<NodeId>{node_id(1), node_id(2), node_id(3), node_id(4), node_id(6)}));
}

TEST(Components, MatchBfsOnRandomGraphs) {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 1 + rng.below(30);
        const auto m = rng.below(2 * n);
        std::vector<NodeId> nodes;
        for (std::uint32_t i = 0; i < n; ++i) nodes.push_back(node_id(static_cast<std::uint32_t>(i * 3 + 1)));
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (std::uint64_t k = 0; k < m; ++k)
            edges.emplace_back(nodes[rng.below(n)], nodes[rng.below(n)]);
        EXPECT_EQ(connected_components(nodes, edges), oracle::bfs_components(nodes, edges));
    }
}

TEST(DatasetStats, HandComputedSixNodeTrace) {
    const auto s = dataset_stats(six_nodes(), 1.0);
    EXPECT_EQ(s.samples, 10U);
    EXPECT_DOUBLE_EQ(s.avg_nodes, 5.0);
    EXPECT_DOUBLE_EQ(s.avg_components, 3.2);
    EXPECT_DOUBLE_EQ(s.avg_singletons, 1.8);
    EXPECT_DOUBLE_EQ(s.avg_degree, 0.72);
    EXPECT_DOUBLE_EQ(s.avg_component_size, 50.0 / 32.0);
    EXPECT_EQ(s.contact_duration_ccdf,
              (std::vector<CcdfPoint>{{0, 1}, {2, 0.5}, {4, 0.25}, {10, 0}}));
    const std::vector<std::pair<NodeId, std::optional<double>>> first{
        {node_id(1), 0.0}, {node_id(2), 0.0}, {node_id(3), 2.0},
        {node_id(4), 1.0}, {node_id(5), 1.0}, {node_id(6), 1.0}};
    EXPECT_EQ(s.time_to_first_contact, first);
}

TEST(DatasetStats, AgreesWithSnapshotOracle) {
    SyntheticConfig cfg;
    cfg.area = {0, 0, 700, 700};
    cfg.arrival_rate = 0.2;
    cfg.horizon = 300;
    cfg.warmup = 300;
    const auto ct = derive_contacts(generate_synthetic(cfg, 13));
    const auto s = dataset_stats(ct, 1.0);
    double nodes = 0, comps = 0, singles = 0, edges = 0;
    std::size_t k = 0;
    for (; static_cast<double>(k) < ct.duration(); ++k) {
        const auto g = oracle::snap(ct, static_cast<double>(k));
        const auto parts = oracle::bfs_components(g.nodes, g.edges);
        nodes += static_cast<double>(g.nodes.size());
        comps += static_cast<double>(parts.size());
        for (const auto& p : parts) singles += p.size() == 1 ? 1 : 0;
        edges += static_cast<double>(g.edges.size());
    }
    EXPECT_EQ(s.samples, k);
    EXPECT_NEAR(s.avg_nodes, nodes / static_cast<double>(k), 1e-12);
    EXPECT_NEAR(s.avg_components, comps / static_cast<double>(k), 1e-12);
    EXPECT_NEAR(s.avg_singletons, singles / static_cast<double>(k), 1e-12);
    EXPECT_NEAR(s.avg_degree, 2 * edges / nodes, 1e-12);
}
