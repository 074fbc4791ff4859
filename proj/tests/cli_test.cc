// Copyright 2026 The seqauction Authors.
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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlohmann/json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("seqauction_cli_") + info->name() + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with `args`; stdout and stderr land in out_ and err_.
  int Run(const std::string& args) {
    const fs::path so = dir_ / "stdout.txt";
    const fs::path se = dir_ / "stderr.txt";
    const std::string cmd = std::string(SEQAUCTION_CLI_PATH) + " " + args + " >" +
                            so.string() + " 2>" + se.string();
    const int status = std::system(cmd.c_str());
    out_ = Slurp(so);
    err_ = Slurp(se);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string Slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::string Sample(const std::string& name) {
    return std::string(SEQAUCTION_SAMPLES_DIR) + "/" + name;
  }

  fs::path WriteConfig(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
  std::string out_;
  std::string err_;
};

TEST_F(CliTest, Table1) {
  const fs::path out = dir_ / "t1";
  ASSERT_EQ(Run("table1 --out " + out.string()), 0) << err_;
  const std::string csv = Slurp(out / "table1.csv");
  EXPECT_NE(csv.find("optimal,0.3819444444,0.2893518519"), std::string::npos) << csv;
  EXPECT_NE(csv.find("must_sell,0.25,0.25"), std::string::npos);
  EXPECT_NE(csv.find("optimal_spa,0.303"), std::string::npos);
  const Json manifest = Json::parse(Slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["command"], "table1");
  EXPECT_TRUE(manifest.contains("git_describe"));
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  EXPECT_TRUE(fs::exists(out / "table1_diff.json"));
}

TEST_F(CliTest, Table1MonteCarloColumns) {
  const fs::path out = dir_ / "mc";
  ASSERT_EQ(Run("table1 --mc 20000 --seed 3 --out " + out.string()), 0) << err_;
  const std::string csv = Slurp(out / "table1.csv");
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_NE(header.find("mc"), std::string::npos) << header;
  EXPECT_EQ(Json::parse(Slurp(out / "manifest.json"))["seed"], 3);
}

TEST_F(CliTest, Table1ToleranceFailure) {
  EXPECT_EQ(Run("table1 --tolerance 1e-12 --out " + (dir_ / "x").string()), 1);
}

TEST_F(CliTest, OutputUnderRegularFileIsIoError) {
  const fs::path blocker = dir_ / "blocker";
  std::ofstream(blocker) << "x";
  EXPECT_EQ(Run("table1 --out " + (blocker / "out").string()), 2);
  EXPECT_FALSE(err_.empty());
}

TEST_F(CliTest, RunReportsRegime) {
  const fs::path out = dir_ / "t3";
  ASSERT_EQ(Run("run --config " + Sample("t3_uniform.json") + " --mc 20000 --out " +
                out.string()),
            0)
      << err_;
  const Json rep = Json::parse(Slurp(out / "report.json"));
  EXPECT_EQ(rep["regime"], "T3");
  EXPECT_LT(rep["diagnostics"]["z_at_r"].get<double>(), 0.0);
  EXPECT_NEAR(rep["analytic"]["seller1"].get<double>(), 0.3587, 5e-4);
  EXPECT_EQ(rep["monte_carlo"]["replications"], 20000);
}

TEST_F(CliTest, RunErrorsMapToExitCodes) {
  const auto pyb = WriteConfig(
      "pyb.json", R"({"dist": {"family": "uniform"}, "format": "pay-your-bid", "r": 0.6})");
  EXPECT_EQ(Run("run --config " + pyb.string() + " --out " + (dir_ / "a").string()), 3);
  const auto nodist = WriteConfig("nodist.json", R"({"n_bidders": 3})");
  EXPECT_EQ(Run("run --config " + nodist.string() + " --out " + (dir_ / "b").string()), 2);
  EXPECT_NE(err_.find("/dist"), std::string::npos) << err_;
  EXPECT_FALSE(fs::exists(dir_ / "b"));
  EXPECT_EQ(Run("run --config " + (dir_ / "missing.json").string() + " --out " +
                (dir_ / "c").string()),
            2);
  const auto garbage = WriteConfig("bad.json", "{not json");
  EXPECT_EQ(Run("run --config " + garbage.string() + " --out " + (dir_ / "d").string()), 2);
}

TEST_F(CliTest, AuditPassesForOptimalMechanism) {
  const auto cfg = WriteConfig(
      "t1.json", R"({"dist": {"family": "uniform"}, "grid_density": 12, "seed": 4})");
  const fs::path out = dir_ / "audit";
  ASSERT_EQ(Run("audit --config " + cfg.string() + " --mc 20000 --out " + out.string()), 0)
      << out_ << err_;
  const Json rep = Json::parse(Slurp(out / "ic_audit.json"));
  EXPECT_LE(rep["ic"]["max_regret"].get<double>(), 1e-3);
}

TEST_F(CliTest, AuditCatchesSabotage) {
  const auto cfg = WriteConfig(
      "bad.json",
      R"({"dist": {"family": "uniform"}, "grid_density": 12, "seed": 4, "misallocate_to_top": true})");
  EXPECT_EQ(Run("audit --config " + cfg.string() + " --mc 20000 --out " +
                (dir_ / "audit").string()),
            1);
  EXPECT_NE((out_ + err_).find("FAIL worst underreport pair"), std::string::npos)
      << out_ << err_;
}

TEST_F(CliTest, AuditWarnsOnCoarseGrid) {
  const auto cfg = WriteConfig(
      "coarse.json", R"({"dist": {"family": "uniform"}, "grid_density": 5})");
  EXPECT_EQ(Run("audit --config " + cfg.string() + " --mc 5000 --out " +
                (dir_ / "audit").string()),
            0);
  EXPECT_NE(err_.find("warning"), std::string::npos) << err_;
}

TEST_F(CliTest, BidCurves) {
  const fs::path out = dir_ / "curves";
  ASSERT_EQ(Run("bid-curves --out " + out.string()), 0) << err_;
  const std::string h = Slurp(out / "pyb_participation.csv");
  EXPECT_NE(h.find("\n0.3333333333,0.1111111111\n"), std::string::npos);
  EXPECT_NE(h.find("\n0.4,0.4\n"), std::string::npos);
  EXPECT_NE(h.find("\n0.5,0.75\n"), std::string::npos);
  const std::string cut = Slurp(out / "pooling_cutoffs.csv");
  EXPECT_NE(cut.find("0.3790241"), std::string::npos) << cut;
  EXPECT_NE(cut.find(",0.5978"), std::string::npos) << cut;
  EXPECT_NE(cut.find(",0.8166"), std::string::npos) << cut;
  EXPECT_TRUE(fs::exists(out / "spa_bid.csv"));
  EXPECT_TRUE(fs::exists(out / "pyb_bid.csv"));
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const std::string args = "run --config " + Sample("t4_uniform.json") + " --mc 30000 --out ";
  ASSERT_EQ(Run(args + (dir_ / "a").string()), 0) << err_;
  ASSERT_EQ(Run(args + (dir_ / "b").string()), 0) << err_;
  EXPECT_EQ(Slurp(dir_ / "a" / "report.json"), Slurp(dir_ / "b" / "report.json"));
  ASSERT_EQ(Run("bid-curves --out " + (dir_ / "c").string()), 0);
  ASSERT_EQ(Run("bid-curves --out " + (dir_ / "d").string()), 0);
  for (const char* f : {"pyb_bid.csv", "spa_bid.csv", "pooling_cutoffs.csv"}) {
    EXPECT_EQ(Slurp(dir_ / "c" / f), Slurp(dir_ / "d" / f)) << f;
  }
}

}  // namespace
