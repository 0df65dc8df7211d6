// Copyright 2026 The dpmi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "dpmi/dp/rdp_accountant.h"
#include "gtest/gtest.h"

namespace dpmi::cli {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("dpmi_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Invocation {
  int code = 0;
  std::string out, err;
};

Invocation Dpmi(std::vector<std::string> args) {
  args.insert(args.begin(), "dpmi");
  std::ostringstream out, err;
  Invocation r;
  r.code = RunDpmi(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string WriteConfig(const fs::path& dir, const std::string& id,
                        const std::string& extra = "") {
  const fs::path path = dir / (id + ".json");
  std::ofstream(path) << R"({"experiment_id": ")" << id << R"(",
    "dataset": {"generator": "carts", "records": 400, "width": 20, "classes": 3, "seed": 1},
    "target_size": 60,
    "model": {"hidden": [8], "batch_size": 20, "epochs": 3, "early_stopping": false},
    "attack": {"kind": "both", "shadows": 1, "max_epochs": 3},
    "repeats": 1)" << extra << "}";
  return path.string();
}

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(ExitCode(absl::InvalidArgumentError("x")), 2);
  EXPECT_EQ(ExitCode(absl::AlreadyExistsError("x")), 2);
  EXPECT_EQ(ExitCode(absl::NotFoundError("x")), 2);
  EXPECT_EQ(ExitCode(absl::InternalError("x")), 1);
  EXPECT_EQ(ExitCode(absl::UnavailableError("x")), 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(Dpmi({"bogus"}).code, 2);
  EXPECT_EQ(Dpmi({"run"}).code, 2);
  EXPECT_EQ(Dpmi({"account", "--steps", "10"}).code, 2);
  EXPECT_EQ(Dpmi({"--help"}).code, 0);
}

TEST(Cli, AccountPrintsEpsilon) {
  Invocation r = Dpmi({"account", "--records", "8000", "--lot", "128",
                "--noise-multiplier", "4", "--epochs", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double want = *dp::AccountTraining(128.0 / 8000, 4.0, 12600, 1.0 / 8000);
  std::ostringstream line;
  line << "epsilon " << want;
  EXPECT_NE(r.out.find("steps 12600\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("epsilon "), std::string::npos);
  double got = 0.0;
  std::sscanf(r.out.c_str() + r.out.find("epsilon ") + 8, "%lf", &got);
  EXPECT_NEAR(got, want, 1e-9 * want);

  Invocation bad = Dpmi({"account", "--sampling-rate", "0.01", "--noise-multiplier",
                  "1", "--steps", "10"});
  EXPECT_EQ(bad.code, 2);  // no delta and no record count
  Invocation zero = Dpmi({"account", "--sampling-rate", "0.01", "--noise-multiplier",
                   "0", "--steps", "10", "--delta", "1e-5"});
  EXPECT_EQ(zero.code, 0);
  EXPECT_NE(zero.out.find("no privacy"), std::string::npos);
}

TEST(Cli, RunWritesResultsAndRefusesDuplicates) {
  const fs::path dir = TempDir("run");
  const std::string cfg = WriteConfig(dir, "cli-run");
  const std::string out = (dir / "out").string();
  Invocation first = Dpmi({"run", "--config", cfg, "--out", out});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_TRUE(fs::exists(fs::path(out) / "results.csv"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "tradeoff.csv"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "config.json"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "roc_bb_none.csv"));
  EXPECT_NE(first.out.find("cli-run"), std::string::npos);

  Invocation dup = Dpmi({"run", "--config", cfg, "--out", out});
  EXPECT_EQ(dup.code, 2);
  EXPECT_NE(dup.err.find("cli-run"), std::string::npos) << dup.err;
  EXPECT_EQ(Dpmi({"run", "--config", cfg, "--out", out, "--force"}).code, 0);

  Invocation report = Dpmi({"report", "--out", out});
  EXPECT_EQ(report.code, 0);
  EXPECT_NE(report.out.find("cli-run"), std::string::npos);
}

TEST(Cli, RunRejectsSweepConfigs) {
  const fs::path dir = TempDir("runsweep");
  const std::string cfg = WriteConfig(
      dir, "sw", R"(, "privacy": {"mode": "ldp"}, "sweep": {"epsilon_i": [1]})");
  EXPECT_EQ(Dpmi({"run", "--config", cfg, "--out", (dir / "o").string()}).code, 2);
}

TEST(Cli, OutputDirectoryFallsBackToEnvironment) {
  const fs::path dir = TempDir("env");
  ::unsetenv("DPMI_OUT");
  EXPECT_EQ(Dpmi({"report"}).code, 2);
  ::setenv("DPMI_OUT", (dir / "envout").string().c_str(), 1);
  const std::string cfg = WriteConfig(dir, "env-run");
  Invocation r = Dpmi({"sweep", "--config", cfg});
  ::unsetenv("DPMI_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "envout" / "results.csv"));
}

TEST(Cli, GenWritesDatasetAndSplits) {
  const fs::path dir = TempDir("gen");
  const std::string cfg = WriteConfig(dir, "g");
  Invocation r = Dpmi({"gen", "--config", cfg, "--out", (dir / "data").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "data" / "carts.csv"));
  EXPECT_TRUE(fs::exists(dir / "data" / "carts_splits.json"));
}

TEST(Cli, MissingConfigIsValidationError) {
  const fs::path dir = TempDir("missing");
  EXPECT_EQ(Dpmi({"run", "--config", (dir / "nope.json").string(), "--out",
                  dir.string()}).code,
            2);
}

}  // namespace
}  // namespace dpmi::cli
