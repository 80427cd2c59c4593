#include "cli.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using snowball::cli::run;

namespace {

const std::string kData = SNOWBALL_DATA_DIR;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("snowball_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }
    std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
    static std::string read(const std::string& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }
    static std::size_t lines(const std::string& p) {
        const auto text = read(p);
        return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

} // namespace

TEST_F(Cli, CalibrateFixture) {
    ASSERT_EQ(call({"--out", path("d"), "calibrate", "--events", kData + "/fixtures/events_small.csv",
                    "--scheme", "distinct"}),
              0)
        << err_.str();
    const auto csv = read(path("d/calibration.csv"));
    EXPECT_EQ(csv.rfind("scheme,pattern,eta_global,eta_source,eta_target,eta_star,omega,omega_star\n", 0), 0u);
    EXPECT_NE(csv.find("distinct,1000,"), std::string::npos);

    ASSERT_EQ(call({"--out", path("af"), "calibrate", "--events", kData + "/fixtures/events_small.csv"}), 0)
        << err_.str();
    EXPECT_EQ(lines(path("af/calibration.csv")), 1u + 7u);

    ASSERT_EQ(call({"--out", path("j"), "--format", "json", "calibrate", "--events",
                    kData + "/fixtures/events_small.csv"}),
              0);
    const auto doc = nlohmann::json::parse(read(path("j/calibration.json")));
    EXPECT_TRUE(doc.is_object());
}

TEST_F(Cli, CalibrateEmptyCorpusIsConfigError) {
    {
        std::ofstream f(path("empty.csv"));
        f << "tweet_id,author,interactor,types\n";
    }
    EXPECT_EQ(call({"--out", path("d"), "calibrate", "--events", path("empty.csv")}), 2);
    EXPECT_NE(err_.str().find("empty corpus"), std::string::npos);
}

TEST_F(Cli, MissingFileAndBadFieldsExitTwo) {
    EXPECT_EQ(call({"calibrate", "--events", path("nope.csv")}), 2);
    EXPECT_EQ(call({"--out", path("g"), "gen-sbm", "--blocks", "2", "--block-size", "5", "--k", "10"}), 2);
    EXPECT_NE(err_.str().find("infeasible"), std::string::npos);
    {
        std::ofstream f(path("bad.cfg"));
        f << "block_sizes = 100,100\nk_intra = ten\n";
    }
    EXPECT_EQ(call({"--out", path("g"), "gen-sbm", "--config", path("bad.cfg")}), 2);
    EXPECT_NE(err_.str().find("k_intra"), std::string::npos);
}

TEST_F(Cli, GenerateAndSample) {
    ASSERT_EQ(call({"--out", path("g"), "gen-sbm", "--config", kData + "/demo_sbm.cfg"}), 0) << err_.str();
    EXPECT_EQ(lines(path("g/labels.csv")), 1601u);
    EXPECT_EQ(lines(path("g/seeds.txt")), 8u);

    ASSERT_EQ(call({"--out", path("s"), "--seed", "3", "sample", "--graph", path("g/edges.tsv"),
                    "--seeds-file", path("g/seeds.txt"), "--strategy", "MAS", "--labels",
                    path("g/labels.csv")}),
              0)
        << err_.str();
    const auto steps = lines(path("s/trace.csv")) - 1;
    EXPECT_LE(steps, 1600u - 8u);
    EXPECT_EQ(lines(path("s/access_log.csv")) - 1, steps + 8);
    const auto manifest = nlohmann::json::parse(read(path("s/manifest.json")));
    EXPECT_EQ(manifest["strategy"], "MAS");
    EXPECT_EQ(manifest["result"]["steps"], steps);
    EXPECT_TRUE(fs::exists(path("s/evolution.csv")));

    EXPECT_EQ(call({"--out", path("x"), "sample", "--graph", path("g/edges.tsv"), "--seeds", "nobody"}), 2);
}

TEST_F(Cli, ManifestReplayIsByteIdentical) {
    ASSERT_EQ(call({"--out", path("g"), "gen-sbm", "--blocks", "4", "--block-size", "100"}), 0);
    ASSERT_EQ(call({"--out", path("a"), "--seed", "11", "sample", "--graph", path("g/edges.tsv"),
                    "--seeds-file", path("g/seeds.txt"), "--strategy", "RS_SW", "--steps", "150"}),
              0)
        << err_.str();
    ASSERT_EQ(call({"--out", path("b"), "sample", "--manifest", path("a/manifest.json")}), 0) << err_.str();
    EXPECT_EQ(read(path("a/trace.csv")), read(path("b/trace.csv")));
    EXPECT_EQ(read(path("a/access_log.csv")), read(path("b/access_log.csv")));
}

TEST_F(Cli, MetricsOverRunsUsesMinCommonSize) {
    ASSERT_EQ(call({"--out", path("g"), "gen-sbm", "--blocks", "4", "--block-size", "100"}), 0);
    ASSERT_EQ(call({"--out", path("r1"), "sample", "--graph", path("g/edges.tsv"), "--seeds-file",
                    path("g/seeds.txt"), "--steps", "60"}),
              0);
    ASSERT_EQ(call({"--out", path("r2"), "sample", "--graph", path("g/edges.tsv"), "--seeds-file",
                    path("g/seeds.txt"), "--strategy", "RO", "--steps", "90"}),
              0);
    ASSERT_EQ(call({"--out", path("m"), "metrics", "--run", path("r1"), "--run", path("r2"), "--labels",
                    path("g/labels.csv")}),
              0)
        << err_.str();
    std::istringstream csv(read(path("m/metrics.csv")));
    std::string header, row1, row2;
    std::getline(csv, header);
    std::getline(csv, row1);
    std::getline(csv, row2);
    EXPECT_EQ(header.rfind("run,n,m,cc_local", 0), 0u);
    EXPECT_NE(row1.find(",64,"), std::string::npos);
    EXPECT_NE(row2.find(",64,"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("m/r1.evolution.csv")));
}

TEST_F(Cli, SweepCreatesOneDirectoryPerCell) {
    ASSERT_EQ(call({"--out", path("w"), "sweep", "--blocks", "4", "--block-size", "60", "--k", "6", "--r",
                    "1,4", "--strategies", "MAS,RO", "--repeats", "3", "--steps", "40"}),
              0)
        << err_.str();
    std::size_t runs = 0;
    for (const auto& e : fs::directory_iterator(path("w/runs"))) runs += e.is_directory();
    EXPECT_EQ(runs, 12u);
    EXPECT_EQ(lines(path("w/sweep.csv")), 13u);
}
