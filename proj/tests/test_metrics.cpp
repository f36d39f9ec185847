#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <pnt/pnt.hpp>

using namespace pnt;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

RunReport sample_run(std::uint64_t seed) {
    SyntheticConfig c;
    c.area = {0, 0, 700, 700};
    c.arrival_rate = 0.08;
    c.horizon = 600;
    c.warmup = 300;
    const auto mob = generate_synthetic(c, seed);
    const auto ct = derive_contacts(mob);
    PeriodicConfig p;
    p.whom = WhomStrategy::gps_potential;
    return run_periodic(ct, &mob, p, seed);
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pnt-metrics-" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST(OffloadRatio, Cases) {
    EXPECT_EQ(offload_ratio(500, 500), 0.0);
    EXPECT_DOUBLE_EQ(offload_ratio(20, 1000), 0.98);
    EXPECT_DOUBLE_EQ(offload_ratio(1500, 1000), -0.5);
    EXPECT_THROW(offload_ratio(1, 0), Error);
    RunReport r;
    r.infra_load = 10;
    attach_reference(r, 0);
    EXPECT_FALSE(r.offload_ratio);
    attach_reference(r, 40);
    EXPECT_DOUBLE_EQ(*r.offload_ratio, 0.75);
}

TEST(Report, JsonRoundTrip) {
    const auto r = sample_run(3);
    ASSERT_FALSE(r.messages.empty());
    const auto back = report_from_json(to_json(r));
    EXPECT_EQ(back, r);
}

TEST(Report, ExportsAreByteIdentical) {
    const auto a = scratch("a.json");
    const auto b = scratch("b.json");
    const auto r = sample_run(4);
    const auto na = export_report(r, a, ExportFormat::json);
    const auto nb = export_report(sample_run(4), b, ExportFormat::json);
    EXPECT_EQ(na, nb);
    EXPECT_EQ(na, std::filesystem::file_size(a));
    EXPECT_EQ(slurp(a), slurp(b));

    const auto da = scratch("a-csv");
    const auto db = scratch("b-csv");
    export_report(r, da, ExportFormat::csv_bundle);
    export_report(r, db, ExportFormat::csv_bundle);
    for (auto f : {"messages.csv", "infection_series.csv", "floating_nodes.csv"})
        EXPECT_EQ(slurp(da / f), slurp(db / f)) << f;
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    std::filesystem::remove_all(da);
    std::filesystem::remove_all(db);
}

TEST(Report, MessagesCsvHasOneRowPerMessage) {
    const auto r = sample_run(5);
    const auto csv = messages_csv(r);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "msg_id,created_s,expires_s,delivery_ratio,late_count,pushes,panic_pushes,infra_bytes,adhoc_bytes");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
        ++rows;
    }
    EXPECT_EQ(rows, r.messages.size());
}

TEST(Report, ExportToMissingDirectoryFails) {
    const auto r = sample_run(5);
    EXPECT_THROW(export_report(r, "/nonexistent-dir/x/report.json", ExportFormat::json), IoError);
}

TEST(Series, PointsAreOrderedAndBounded) {
    const auto r = sample_run(6);
    for (const auto& m : r.messages) {
        const auto s = infection_series(r, m.id);
        ASSERT_FALSE(s.empty());
        EXPECT_DOUBLE_EQ(s.front().time_s, m.created_s);
        for (std::size_t i = 0; i < s.size(); ++i) {
            EXPECT_LE(s[i].infected, s[i].subscribed);
            EXPECT_GE(s[i].ratio(), 0.0);
            EXPECT_LE(s[i].ratio(), 1.0);
            EXPECT_GE(s[i].time_s, m.created_s);
            EXPECT_LE(s[i].time_s, m.expires_s);
            if (i > 0) {
                EXPECT_LT(s[i - 1].time_s, s[i].time_s);
                EXPECT_FALSE(s[i - 1].infected == s[i].infected && s[i - 1].subscribed == s[i].subscribed);
            }
        }
        EXPECT_TRUE(series_at(s, m.expires_s - 1e-6));
    }
}

TEST(Series, StepLookup) {
    const std::vector<SeriesPoint> s{{0, 0, 0, 2}, {0, 5, 1, 2}, {0, 9, 2, 2}};
    EXPECT_FALSE(series_at(s, -1));
    EXPECT_EQ(series_at(s, 4.9)->infected, 0U);
    EXPECT_EQ(series_at(s, 5)->infected, 1U);
    EXPECT_EQ(series_at(s, 100)->infected, 2U);
    EXPECT_EQ(SeriesPoint{}.ratio(), 0.0);
}

TEST(Aggregate, MeansAndExtremes) {
    std::vector<RunReport> runs(3);
    const double ratios[] = {0.5, 0.8, 0.2};
    for (int i = 0; i < 3; ++i) {
        runs[i].infra_load = 100 * (i + 1);
        runs[i].offload_ratio = ratios[i];
    }
    const auto a = aggregate(runs);
    EXPECT_EQ(a.runs, 3U);
    EXPECT_DOUBLE_EQ(a.mean_offload, 0.5);
    EXPECT_DOUBLE_EQ(a.min_offload, 0.2);
    EXPECT_DOUBLE_EQ(a.max_offload, 0.8);
    EXPECT_DOUBLE_EQ(a.mean_infra_load, 200.0);
}

TEST(Floating, SummaryCountsEntrants) {
    RunReport r;
    r.floating_nodes = {{1, 0, 10, true, 2.0, Via::adhoc, false},
                        {2, 0, 10, true, 4.0, Via::infra, true},
                        {3, 0, 10, false, std::nullopt, Via::none, false}};
    const auto s = summarize_floating(r);
    EXPECT_EQ(s.entrants, 3U);
    EXPECT_EQ(s.delivered, 2U);
    EXPECT_EQ(s.pushed, 1U);
    EXPECT_DOUBLE_EQ(s.delivery_ratio, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.mean_delay_s, 3.0);
    const auto csv = floating_csv(r);
    EXPECT_NE(csv.find("3,0,10,0,,none,0"), std::string::npos);
}
