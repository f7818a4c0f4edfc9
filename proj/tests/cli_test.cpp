// Copyright 2026 The Raceline Authors
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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using raceline::testing::data_path;

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run_cli(const std::string& args) {
  const fs::path err = fs::temp_directory_path() / "raceline_cli_stderr.txt";
  const std::string cmd = std::string(RACELINE_CLI) + " " + args + " 2>" + err.string();
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("raceline_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream t(dir_ / "circle.csv");
    t << "x_m,y_m,width_m\n";
    for (int i = 0; i < 72; ++i) {
      const double a = 2.0 * std::numbers::pi * i / 72;
      t << 3.0 * std::cos(a) << ',' << 3.0 * std::sin(a) << ",1.0\n";
    }
    t.close();
    write_config("config.toml", "");
  }

  void write_config(const std::string& name, const std::string& extra_optimizer, const std::string& top = "") {
    std::ofstream c(dir_ / name);
    c << "track = \"circle.csv\"\nnodes = 8\nout = \"" << (dir_ / "out").string() << "\"\n" << top
      << "[optimizer]\nn_init = 4\nbudget = 3\nacq_candidates = 256\nacq_restarts = 2\ngp_restarts = 2\n"
      << extra_optimizer << "[compare]\nruns = 2\nmethods = \"random,ei\"\n";
  }

  std::string config() const { return "--config " + (dir_ / "config.toml").string(); }
  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

double last_tau_best(const fs::path& history) {
  const auto rows = lines(slurp(history));
  std::stringstream ss(rows.back());
  std::string cell;
  std::getline(ss, cell, ',');
  std::getline(ss, cell, ',');
  std::getline(ss, cell, ',');
  return std::stod(cell);
}

double printed_lap_time(const std::string& out) {
  const auto pos = out.find("lap_time_s ");
  return pos == std::string::npos ? NAN : std::stod(out.substr(pos + 11));
}

TEST_F(CliTest, OptimizeWritesEveryArtifact) {
  const Result r = run_cli("optimize -q " + config());
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"raceline.csv", "history.csv", "offsets.csv", "raceline.svg", "gg.csv", "gg.svg", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const auto summary = nlohmann::json::parse(slurp(dir_ / "out" / "summary.json"));
  EXPECT_EQ(summary["lap_time_s"].get<double>(), last_tau_best(dir_ / "out" / "history.csv"));
  EXPECT_EQ(summary["seed"], 0);
  EXPECT_TRUE(summary.contains("runtime_s"));
  EXPECT_EQ(summary["config"]["optimizer"]["budget"], 3);
  EXPECT_EQ(lines(slurp(dir_ / "out" / "history.csv")).size(), 1u + 4u + 3u);
  EXPECT_EQ(lines(slurp(dir_ / "out" / "raceline.csv")).front(), "s_m,x_m,y_m,v_mps,t_s,a_long_mps2,a_lat_mps2");
}

TEST_F(CliTest, FlagsOverrideTheConfigFile) {
  const Result r = run_cli("optimize -q " + config() + " --budget 1 --seed 9 --nodes 6 --acquisition nei --out " + (dir_ / "o2").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = nlohmann::json::parse(slurp(dir_ / "o2" / "summary.json"));
  EXPECT_EQ(s["config"]["optimizer"]["budget"], 1);
  EXPECT_EQ(s["config"]["optimizer"]["seed"], 9);
  EXPECT_EQ(s["config"]["optimizer"]["acquisition"], "nei");
  EXPECT_EQ(s["config"]["nodes"], 6);
  EXPECT_EQ(s["w_best_m"].size(), 6u);
}

TEST_F(CliTest, RunsAreBitReproducibleAndReplayableFromTheSummary) {
  ASSERT_EQ(run_cli("optimize -q " + config() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run_cli("optimize -q " + config() + " --out " + (dir_ / "b").string()).code, 0);
  ASSERT_EQ(run_cli("optimize -q --config " + (dir_ / "a" / "summary.json").string() + " --out " + (dir_ / "c").string()).code, 0);
  for (const char* f : {"raceline.csv", "history.csv", "gg.csv", "offsets.csv", "raceline.svg"}) {
    const std::string a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(a, slurp(dir_ / "c" / f)) << f;
  }
}

TEST_F(CliTest, EvaluateReproducesTheOptimizedLapTime) {
  ASSERT_EQ(run_cli("optimize -q " + config()).code, 0);
  const auto s = nlohmann::json::parse(slurp(dir_ / "out" / "summary.json"));
  const Result best = run_cli("evaluate -q " + config() + " --offsets " + (dir_ / "out" / "offsets.csv").string());
  ASSERT_EQ(best.code, 0) << best.err;
  EXPECT_NEAR(printed_lap_time(best.out), s["lap_time_s"].get<double>(), 1e-9);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "profile.csv"));
  const Result center = run_cli("evaluate -q " + config());
  ASSERT_EQ(center.code, 0) << center.err;
  EXPECT_EQ(printed_lap_time(center.out), s["center_line_lap_time_s"].get<double>());
}

TEST_F(CliTest, EvaluateRejectsBadOffsets) {
  std::ofstream(dir_ / "short.csv") << "w_m\n0\n0\n0\n0\n0\n0\n0\n";
  const Result r = run_cli("evaluate -q " + config() + " --offsets " + (dir_ / "short.csv").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("expected 8"), std::string::npos) << r.err;
  std::ofstream(dir_ / "wide.csv") << "0.9, 0, 0, 0, 0, 0, 0, 0\n";
  EXPECT_EQ(run_cli("evaluate -q " + config() + " --offsets " + (dir_ / "wide.csv").string()).code, 2);
  std::ofstream(dir_ / "text.csv") << "w_m\n0\nabc\n";
  EXPECT_EQ(run_cli("evaluate -q " + config() + " --offsets " + (dir_ / "text.csv").string()).code, 2);
}

TEST_F(CliTest, MissingTrackNamesThePath) {
  const Result r = run_cli("optimize -q " + config() + " --track /no/such/track.csv");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/no/such/track.csv"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigErrorsAreUsageErrors) {
  std::ofstream(dir_ / "broken.toml") << "track = \"circle.csv\"\nnodes 8\n";
  const Result r = run_cli("optimize -q --config " + (dir_ / "broken.toml").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli("optimize -q --config " + (dir_ / "nothing.toml").string()).code, 2);
  EXPECT_EQ(run_cli("optimize -q " + config() + " --nodes 40").code, 2);
  EXPECT_EQ(run_cli("optimize -q " + config() + " --acquisition ucb").code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("launch").code, 2);
  EXPECT_EQ(run_cli("optimize").code, 2);
  EXPECT_EQ(run_cli("optimize " + config() + " --budget many").code, 2);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST_F(CliTest, InfeasibleInitializationIsANumericalError) {
  write_config("fast.toml", "", "v0 = 100.0\n");
  const Result r = run_cli("optimize -q --config " + (dir_ / "fast.toml").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos) << r.err;
}

TEST_F(CliTest, CompareWritesTheReport) {
  const Result r = run_cli("compare -q " + config() + " --jobs 2");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"comparison.csv", "comparison.json", "comparison.svg", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const auto rows = lines(slurp(dir_ / "out" / "comparison.csv"));
  EXPECT_EQ(rows.size(), 1u + 2u * 7u);
  const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "comparison.json"));
  EXPECT_EQ(j["methods"].size(), 2u);
  EXPECT_EQ(j["n_runs"], 2);
}

TEST_F(CliTest, CompareRejectsBadMethodsAndRunCounts) {
  const Result bad = run_cli("compare -q " + config() + " --methods ei,cmaes");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("random, ei, nei"), std::string::npos) << bad.err;
  const Result one = run_cli("compare -q " + config() + " --runs 1");
  EXPECT_EQ(one.code, 2);
  EXPECT_NE(one.err.find("runs"), std::string::npos) << one.err;
}

}  // namespace
