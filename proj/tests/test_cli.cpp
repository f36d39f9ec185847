#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

// Per-test scratch directory, so tests can run in parallel.
fs::path kRoot;

int run(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" PNT_CLI_PATH "\" " + args + " > \"" +
                            (kRoot / "stdout.txt").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream f(p);
    return nlohmann::json::parse(f);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        kRoot = fs::temp_directory_path() /
                ("pnt-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
        std::ofstream(kRoot / "six.csv") << "node_a,node_b,start_s,end_s\n"
                                            "1,1,0,10\n2,2,0,10\n3,3,0,10\n4,4,0,10\n5,5,0,5\n6,6,5,10\n"
                                            "1,2,0,10\n2,3,2,6\n4,5,1,3\n4,6,6,8\n";
    }
    void TearDown() override { fs::remove_all(kRoot); }

    // Small synthetic trace shared by the simulation commands.
    std::string trace() {
        const auto dir = kRoot / "gen";
        EXPECT_EQ(run("-o \"" + dir.string() +
                      "\" --seed 3 generate --side 700 --arrival-rate 0.05 --horizon 600 --warmup 300"),
                  0);
        return (dir / "trace.csv").string();
    }
};

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
    const auto a = kRoot / "a";
    const auto b = kRoot / "b";
    ASSERT_EQ(run("-o \"" + a.string() + "\" --seed 9 generate --horizon 300 --warmup 100"), 0);
    ASSERT_EQ(run("-o \"" + b.string() + "\" --seed 9 generate --horizon 300 --warmup 100"), 0);
    EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
    EXPECT_FALSE(slurp(a / "trace.csv").empty());
}

TEST_F(Cli, AnalyzeSixNodeContacts) {
    const auto out = kRoot / "an";
    ASSERT_EQ(run("-o \"" + out.string() + "\" analyze --contacts \"" + (kRoot / "six.csv").string() + "\""), 0);
    const auto j = read_json(out / "stats.json");
    EXPECT_EQ(j["nodes"], 6);
    EXPECT_EQ(j["samples"], 10);
    EXPECT_DOUBLE_EQ(j["avg_components"].get<double>(), 3.2);
    EXPECT_DOUBLE_EQ(j["avg_singletons"].get<double>(), 1.8);
    EXPECT_DOUBLE_EQ(j["avg_degree"].get<double>(), 0.72);
    EXPECT_DOUBLE_EQ(j["time_to_first_contact_s"]["3"].get<double>(), 2.0);
}

TEST_F(Cli, PeriodicWritesReportsAndAggregate) {
    const auto t = trace();
    const auto out = kRoot / "per";
    ASSERT_EQ(run("-o \"" + out.string() + "\" periodic --trace \"" + t +
                  "\" --when linear --whom gps-potential --replications 2 --format csv"),
              0);
    for (auto f : {"run_0.json", "run_1.json", "aggregate.json", "run_0/messages.csv", "run_1/infection_series.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    const auto agg = read_json(out / "aggregate.json");
    EXPECT_EQ(agg["runs"], 2);
    const auto r0 = read_json(out / "run_0.json");
    EXPECT_TRUE(r0.contains("offload_ratio"));
}

TEST_F(Cli, PositionStrategyWithoutPositionsIsConfigError) {
    EXPECT_EQ(run("-o \"" + (kRoot / "x").string() + "\" periodic --contacts \"" + (kRoot / "six.csv").string() +
                  "\" --whom gps-density"),
              2);
    EXPECT_EQ(run("-o \"" + (kRoot / "x").string() + "\" analyze --contacts \"" + (kRoot / "six.csv").string() +
                  "\" --whom cc"),
              0);
    EXPECT_EQ(run("-o \"" + (kRoot / "x").string() + "\" analyze --contacts \"" + (kRoot / "six.csv").string() +
                  "\" --whom gps-potential"),
              2);
}

TEST_F(Cli, BadInputs) {
    EXPECT_EQ(run("periodic --contacts \"" + (kRoot / "missing.csv").string() + "\""), 1);
    EXPECT_EQ(run("periodic --when cubic --contacts \"" + (kRoot / "six.csv").string() + "\""), 2);
    EXPECT_EQ(run("nonsense"), 2);
    EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, SweepWritesMatrix) {
    const auto out = kRoot / "sw";
    ASSERT_EQ(run("-o \"" + out.string() + "\" sweep --contacts \"" + (kRoot / "six.csv").string() +
                  "\" --period 20 --tick 11 --replications 1"),
              0);
    const auto j = read_json(out / "sweep.json");
    EXPECT_EQ(j["families"], 51);
    const auto csv = slurp(out / "matrix.csv");
    EXPECT_EQ(csv.substr(0, 5), "whom,");
    EXPECT_NE(csv.find("gps-density,NA"), std::string::npos);
}

TEST_F(Cli, FloatingReportsDeliveryRatio) {
    const auto t = trace();
    const auto out = kRoot / "flo";
    ASSERT_EQ(run("-o \"" + out.string() + "\" floating --trace \"" + t + "\" --tolerance 120"), 0);
    const auto j = read_json(out / "aggregate.json");
    EXPECT_GE(j["delivery_ratio"].get<double>(), 0.0);
    EXPECT_LE(j["delivery_ratio"].get<double>(), 1.0);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
    const auto out = kRoot / "env";
    ASSERT_EQ(run("analyze --contacts \"" + (kRoot / "six.csv").string() + "\"",
                  "PNT_OUTPUT_DIR=\"" + out.string() + "\""),
              0);
    EXPECT_TRUE(fs::exists(out / "stats.json"));
}
