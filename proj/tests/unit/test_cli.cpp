// SPDX-License-Identifier: Apache-2.0
//
// qce - channel estimation for coarsely quantized MIMO receivers
// Copyright (C) 2026 The qce authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qce/commands.hpp"

namespace qce {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qce_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& body) {
    const std::string p = (dir_ / name).string();
    std::ofstream(p) << body;
    return p;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qce");
    std::vector<char*> argv;
    for (std::string& a : args) argv.push_back(a.data());
    testing::internal::CaptureStderr();
    testing::internal::CaptureStdout();
    const int code = cli::run(static_cast<int>(argv.size()), argv.data());
    stdout_ = testing::internal::GetCapturedStdout();
    stderr_ = testing::internal::GetCapturedStderr();
    return code;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

  fs::path dir_;
  std::string stdout_;
  std::string stderr_;
};

const char* kGenieConfig = R"({
  "version": 1,
  "seed": 7,
  "scenario": {"antennas": 8},
  "frontend": {"pilots": 1, "bits": [1], "snr_db": [-5, 0, 5, 10]},
  "data": {"train": 500, "test": 200},
  "eval": {"estimators": ["buss_genie"]}
})";

TEST_F(CliTest, GenieOnlyEvaluateWritesOneRowPerSnr) {
  const std::string cfg = write_config("c.json", kGenieConfig);
  ASSERT_EQ(run({"--config", cfg, "--out", (dir_ / "a").string(), "evaluate"}), 0) << stderr_;
  const std::string csv = slurp(dir_ / "a" / "results.csv");
  EXPECT_EQ(line_count(csv), 1u + 4u);
  EXPECT_EQ(csv.rfind("estimator,scenario,snr_db,bits,pilots,antennas,K,L,nmse,rate_lb,t_test,seconds\n", 0), 0u);
  EXPECT_TRUE(stdout_.empty());

  ASSERT_EQ(run({"--config", cfg, "--out", (dir_ / "b").string(), "evaluate"}), 0) << stderr_;
  EXPECT_EQ(csv, slurp(dir_ / "b" / "results.csv"));

  ASSERT_EQ(run({"--config", cfg, "--seed", "8", "--out", (dir_ / "c").string(), "evaluate"}), 0) << stderr_;
  EXPECT_NE(csv, slurp(dir_ / "c" / "results.csv"));
}

TEST_F(CliTest, MissingModelFileExitsWithTwo) {
  const std::string cfg = write_config("c.json", R"({
    "version": 1,
    "scenario": {"antennas": 8},
    "frontend": {"bits": [1], "snr_db": [0]},
    "data": {"train": 200, "test": 50},
    "eval": {"estimators": [{"kind": "bgmm", "model": "nowhere/gmm.qcm"}]}
  })");
  EXPECT_EQ(run({"--config", cfg, "--out", dir_.string(), "evaluate"}), 2);
  EXPECT_NE(stderr_.find("nowhere/gmm.qcm"), std::string::npos) << stderr_;
}

TEST_F(CliTest, UnknownKeyAndBadValuesExitWithTwo) {
  const std::string unknown = write_config("u.json", R"({"version": 1, "scenario": {"antenas": 8}})");
  EXPECT_EQ(run({"--config", unknown, "evaluate"}), 2);
  EXPECT_NE(stderr_.find("antenas"), std::string::npos);

  const std::string version = write_config("v.json", R"({"version": 2})");
  EXPECT_EQ(run({"--config", version, "evaluate"}), 2);

  const std::string bits = write_config("b.json", R"({"version": 1, "frontend": {"bits": [9]}})");
  EXPECT_EQ(run({"--config", bits, "evaluate"}), 2);

  EXPECT_EQ(run({"--config", (dir_ / "absent.json").string(), "evaluate"}), 2);
  EXPECT_EQ(run({"--no-such-flag"}), 2);
}

TEST_F(CliTest, PrintConfigEchoesResolvedValues) {
  const std::string cfg = write_config("c.json", kGenieConfig);
  ASSERT_EQ(run({"--config", cfg, "--seed", "99", "--print-config"}), 0) << stderr_;
  EXPECT_NE(stdout_.find("\"seed\": 99"), std::string::npos) << stdout_;
  EXPECT_NE(stdout_.find("\"version\": 1"), std::string::npos);

  // The echoed configuration is itself a valid config file.
  const std::string echoed = write_config("echo.json", stdout_);
  ASSERT_EQ(run({"--config", echoed, "--print-config"}), 0) << stderr_;
  EXPECT_NE(stdout_.find("\"seed\": 99"), std::string::npos);
}

TEST_F(CliTest, GenerateTrainEvaluateInspect) {
  const std::string cfg = write_config("c.json", R"({
    "version": 1,
    "seed": 3,
    "scenario": {"antennas": 8},
    "frontend": {"bits": [1], "snr_db": [0, 10]},
    "data": {"train": 400, "test": 100},
    "model": {"type": "gmm", "K": 2, "em": {"max_iter": 5}},
    "eval": {"estimators": ["buss_scov", "bgmm"]}
  })");
  const std::string out = (dir_ / "run").string();
  ASSERT_EQ(run({"--config", cfg, "--out", out, "generate"}), 0) << stderr_;
  ASSERT_TRUE(fs::exists(dir_ / "run" / "train_H.qce"));
  ASSERT_EQ(run({"--config", cfg, "--out", out, "train"}), 0) << stderr_;
  ASSERT_TRUE(fs::exists(dir_ / "run" / "gmm_H.qcm"));
  ASSERT_EQ(run({"--config", cfg, "--out", out, "evaluate"}), 0) << stderr_;
  EXPECT_EQ(line_count(slurp(dir_ / "run" / "results.csv")), 1u + 4u);

  ASSERT_EQ(run({"inspect", (dir_ / "run" / "train_H.qce").string(), (dir_ / "run" / "gmm_H.qcm").string()}), 0) << stderr_;
  EXPECT_EQ(line_count(stdout_), 2u);
  EXPECT_NE(stdout_.find("\"samples\":400"), std::string::npos) << stdout_;
  EXPECT_EQ(run({"inspect", (dir_ / "run" / "nothing.qcm").string()}), 2);
}

TEST_F(CliTest, RecoverWritesCsv) {
  const std::string cfg = write_config("c.json", R"({
    "version": 1,
    "scenario": {"antennas": 4},
    "recover": {"bits": [2], "sizes": [200, 2000], "trials": 2}
  })");
  ASSERT_EQ(run({"--config", cfg, "--out", dir_.string(), "recover"}), 0) << stderr_;
  const std::string csv = slurp(dir_ / "recovery.csv");
  EXPECT_EQ(line_count(csv), 1u + 3u * 2u * 2u);
}

}  // namespace
}  // namespace qce
