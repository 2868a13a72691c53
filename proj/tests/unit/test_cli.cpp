// Copyright 2026 The DBF Racing Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dbf/cli.hpp"
#include "dbf/config.hpp"
#include "dbf/errors.hpp"
#include "dbf/raceline_io.hpp"
#include "dbf/track_io.hpp"

namespace dbf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("dbf_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "dbf-sim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path write_config(const std::string& text) const {
    const fs::path p = dir_ / "config.json";
    std::ofstream(p) << text;
    return p;
  }

  fs::path make_circle() {
    const fs::path p = dir_ / "circle.csv";
    EXPECT_EQ(cli({"gen-track", "--shape", "circle", "--radius", "100", "--width", "12", "--out", p.string()}),
              kExitOk)
        << err_.str();
    return p;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(RunConfigJson, RoundTripsLosslessly) {
  RunConfig c;
  c.track = "tracks/chicane.csv";
  c.seed = 1234567890123ULL;
  c.dbf.beta1 = 1.0 / 3.0;
  c.dbf.n_iterations = 10;
  c.sim.prior_noise = 0.1;
  c.sim.anchor_acceleration = true;
  c.raceline_opt.margin = 1.25;
  c.envelope_a_max = {{0.0, 15.0}, {80.0, 0.0}};
  const std::string text = dump_run_config(c);
  const RunConfig back = parse_run_config(text);
  EXPECT_EQ(dump_run_config(back), text);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.dbf.beta1, c.dbf.beta1);
  EXPECT_EQ(back.dbf.seed, c.seed);
  EXPECT_TRUE(back.sim.anchor_acceleration);
  EXPECT_EQ(config_hash(back), config_hash(c));
  c.seed += 1;
  EXPECT_NE(config_hash(back), config_hash(c));
}

TEST(RunConfigJson, DefaultsCarryTableValues) {
  const RunConfig c = parse_run_config("{\"track\": \"t.csv\"}");
  EXPECT_EQ(c.dbf.beta1, 1.75);
  EXPECT_EQ(c.dbf.beta2, 2.5);
  EXPECT_EQ(c.dbf.beta3, 3.5);
  EXPECT_EQ(c.dbf.d_min, -0.875);
  EXPECT_EQ(c.dbf.n_samples, 250);
  EXPECT_EQ(c.laps, 5);
  EXPECT_EQ(c.envelope().hash(), default_envelope().hash());
}

TEST(RunConfigJson, RejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(parse_run_config("{\"track\": \"t.csv\", \"lapz\": 3}"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"dbf\": {\"beta9\": 1}}"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"laps\": \"five\"}"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"planner\": \"mpc\"}"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"dbf\": {\"n_samples\": 1}}"), ConfigError);
  EXPECT_THROW(parse_run_config("not json"), ConfigError);
}

TEST(RunConfigJson, RelativePathsResolveAgainstConfigDir) {
  const RunConfig c = parse_run_config("{\"track\": \"t.csv\", \"out_dir\": \"o\"}", "/data/cfg");
  EXPECT_EQ(c.track_path(), fs::path("/data/cfg/t.csv"));
  EXPECT_EQ(c.out_path(), fs::path("/data/cfg/o"));
  EXPECT_TRUE(c.raceline_path().empty());
  const RunConfig abs = parse_run_config("{\"track\": \"/x/t.csv\"}", "/data/cfg");
  EXPECT_EQ(abs.track_path(), fs::path("/x/t.csv"));
}

TEST_F(CliTest, GenTrackCircleLength) {
  const fs::path p = make_circle();
  const Track t = load_track(p);
  const double L = 2.0 * std::numbers::pi * 100.0;
  EXPECT_NEAR(t.total_length(), L, 0.005 * L);
}

TEST_F(CliTest, GenTrackOvalAndChicaneLoad) {
  const fs::path oval = dir_ / "oval.csv";
  ASSERT_EQ(cli({"gen-track", "--shape", "oval", "--straight", "300", "--out", oval.string()}), kExitOk);
  EXPECT_NO_THROW(load_track(oval));
  ASSERT_EQ(cli({"--out-dir", dir_.string(), "gen-track", "--shape", "chicane"}), kExitOk);
  EXPECT_NO_THROW(load_track(dir_ / "chicane.csv"));
}

TEST_F(CliTest, GenTrackBadParamsAreUsageErrors) {
  EXPECT_EQ(cli({"gen-track", "--shape", "circle", "--width", "0", "--out", (dir_ / "x.csv").string()}), kExitUsage);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_EQ(cli({"gen-track", "--shape", "hexagon"}), kExitUsage);
  EXPECT_EQ(cli({"gen-track", "--shape", "oval", "--radius", "-3", "--out", (dir_ / "x.csv").string()}), kExitUsage);
  EXPECT_EQ(cli({}), kExitUsage);
  EXPECT_EQ(cli({"launch"}), kExitUsage);
}

TEST_F(CliTest, OptimizeRacelineCircleSpeedAndDeterminism) {
  const fs::path track = make_circle();
  const fs::path a = dir_ / "a.csv", b = dir_ / "b.csv";
  ASSERT_EQ(cli({"optimize-raceline", "--track", track.string(), "--out", a.string()}), kExitOk) << err_.str();
  ASSERT_EQ(cli({"optimize-raceline", "--track", track.string(), "--out", b.string()}), kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  const json s = json::parse(slurp(dir_ / "a.summary.json"));
  // Raceline radius on the ring is about R + (half width - margin).
  const double v = std::sqrt(26.5 * (100.0 + 4.5));
  EXPECT_NEAR(s["min_speed_mps"].get<double>(), v, 0.01 * v);
  EXPECT_NEAR(s["max_speed_mps"].get<double>(), v, 0.01 * v);
  EXPECT_TRUE(s.contains("config_hash"));
  const RacelineProfile p = read_raceline(a);
  EXPECT_GT(p.size(), 100u);
}

TEST_F(CliTest, OptimizeRacelineMissingTrack) {
  EXPECT_EQ(cli({"optimize-raceline", "--track", (dir_ / "nope.csv").string()}), kExitUsage);
  EXPECT_EQ(cli({"optimize-raceline"}), kExitUsage);
}

TEST_F(CliTest, RunGroundTruthOneLap) {
  const fs::path track = make_circle();
  const fs::path cfg = write_config("{\"track\": \"circle.csv\", \"out_dir\": \"out\", \"laps\": 1}");
  ASSERT_EQ(cli({"--config", cfg.string(), "run", "--planner", "ground-truth"}), kExitOk) << err_.str();
  const json m = json::parse(slurp(dir_ / "out" / "metrics_ground-truth.json"));
  EXPECT_EQ(m["per_lap"].size(), 1u);
  EXPECT_EQ(m["summary"]["boundary_failures"].get<int>(), 0);
  EXPECT_EQ(m["summary"]["completed_laps"].get<int>(), 1);
  EXPECT_EQ(m["seed"].get<std::uint64_t>(), 7u);
  EXPECT_TRUE(m.contains("config_hash"));
  const std::string trace = slurp(dir_ / "out" / "trace_ground-truth.csv");
  EXPECT_EQ(trace.rfind("# config_hash=", 0), 0u);
  EXPECT_NE(out_.str().find("ground-truth"), std::string::npos);
}

TEST_F(CliTest, RunDbfTwiceIsIdentical) {
  make_circle();
  const fs::path cfg = write_config(
      "{\"track\": \"circle.csv\", \"out_dir\": \"out\", \"laps\": 1, \"dbf\": {\"n_iterations\": 2}}");
  ASSERT_EQ(cli({"--config", cfg.string(), "--seed", "3", "run", "--planner", "dbf"}), kExitOk) << err_.str();
  const std::string first = slurp(dir_ / "out" / "metrics_dbf.json");
  ASSERT_EQ(cli({"--config", cfg.string(), "--seed", "3", "run", "--planner", "dbf"}), kExitOk);
  EXPECT_EQ(slurp(dir_ / "out" / "metrics_dbf.json"), first);
  EXPECT_EQ(json::parse(first)["seed"].get<std::uint64_t>(), 3u);
}

TEST_F(CliTest, RunUsageErrors) {
  make_circle();
  const fs::path cfg = write_config("{\"track\": \"circle.csv\", \"laps\": 1}");
  EXPECT_EQ(cli({"--config", cfg.string(), "run", "--planner", "mpc"}), kExitUsage);
  EXPECT_EQ(cli({"--config", (dir_ / "missing.json").string(), "run"}), kExitUsage);
  const fs::path bad = write_config("{\"track\": \"circle.csv\", \"bogus\": 1}");
  EXPECT_EQ(cli({"--config", bad.string(), "run"}), kExitUsage);
  const fs::path no_track = write_config("{\"track\": \"absent.csv\"}");
  EXPECT_EQ(cli({"--config", no_track.string(), "run"}), kExitUsage);
}

TEST_F(CliTest, CompareNeedsTwoPlanners) {
  make_circle();
  const fs::path cfg = write_config("{\"track\": \"circle.csv\", \"laps\": 1}");
  EXPECT_EQ(cli({"--config", cfg.string(), "compare", "--planners", "dbf"}), kExitUsage);
}

TEST_F(CliTest, CompareWritesRowsPerPlanner) {
  make_circle();
  const fs::path cfg = write_config(
      "{\"track\": \"circle.csv\", \"out_dir\": \"out\", \"laps\": 1, \"dbf\": {\"n_iterations\": 2}}");
  ASSERT_EQ(cli({"--config", cfg.string(), "compare", "--planners", "ground-truth,dbf"}), kExitOk) << err_.str();
  const json c = json::parse(slurp(dir_ / "out" / "compare.json"));
  ASSERT_EQ(c["rows"].size(), 2u);
  EXPECT_EQ(c["rows"][0]["planner"], "ground-truth");
  EXPECT_EQ(c["rows"][1]["planner"], "dbf");
  EXPECT_TRUE(c["rows"][1].contains("dbf"));
  for (const auto& row : c["rows"]) EXPECT_FALSE(row["spin_out"].get<bool>());
  EXPECT_TRUE(fs::exists(dir_ / "out" / "metrics_dbf.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trace_ground-truth.csv"));
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(cli({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("compare"), std::string::npos);
}

}  // namespace
}  // namespace dbf
