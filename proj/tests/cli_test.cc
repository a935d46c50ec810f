// Copyright 2026 The semirng Authors.
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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "semirng/tensor_io.h"

namespace semirng {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " SEMIRNG_CLI " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string case_path(const char* name) {
  return std::string(SEMIRNG_CASES) + "/" + name;
}

TEST(CliTest, UniformRnntGrid) {
  const CliRun r = run("rnnt " + case_path("rnnt_uniform_4x3.json") +
                    " --count-ops --semiring log-entropy --oracle-check");
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["nll"].get<double>(), std::log(128.0 / 35.0), 1e-14);
  EXPECT_NEAR(j["entropy"].get<double>(), 35.0 / 128.0 * 7.0 * std::log(2.0), 1e-14);
  EXPECT_EQ(j["ops"]["mul"], 93);
  EXPECT_EQ(j["ops"]["add"], 55);
  EXPECT_EQ(j["naive_ops"]["mul"], 280);
  EXPECT_EQ(j["naive_ops"]["add"], 34);
  EXPECT_EQ(j["paths"], 35);
}

TEST(CliTest, CtcOracleCheck) {
  const CliRun r = run("ctc " + case_path("ctc_uniform.json") + " --entropy --oracle-check");
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["paths"], 3);
  EXPECT_EQ(j["oracle"]["paths"], 3);
  EXPECT_NEAR(j["nll"].get<double>(), j["oracle"]["nll"].get<double>(), 1e-15);
  EXPECT_NEAR(j["entropy"].get<double>(), j["oracle"]["entropy"].get<double>(), 1e-15);
}

TEST(CliTest, ZeroAlphaTotalEqualsNll) {
  const CliRun r = run("ctc " + case_path("ctc_distill.json") + " --alpha-ent 0");
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["total"].get<double>(), j["nll"].get<double>());
}

TEST(CliTest, Distill) {
  for (const char* name : {"ctc_distill.json", "rnnt_distill.json"}) {
    const CliRun r = run("distill " + case_path(name) + " --alpha-state 0.5 --alpha-seq 1");
    ASSERT_EQ(r.exit_code, 0) << name;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["ops"]["traversals"], 1);
    EXPECT_NEAR(j["total"].get<double>(),
                j["nll"].get<double>() + 0.5 * j["kl_state"].get<double>() +
                    j["kl_seq"].get<double>(),
                1e-14);
  }
  EXPECT_EQ(run("distill " + case_path("ctc_uniform.json") + " --alpha-seq 1").exit_code, 2);
}

TEST(CliTest, GradientKeys) {
  const CliRun r = run("ctc " + case_path("ctc_uniform.json") + " --grad");
  ASSERT_EQ(r.exit_code, 0);
  const json j = json::parse(r.out);
  ASSERT_TRUE(j.contains("grad"));
  double sum = 0.0;
  for (const auto& [key, value] : j["grad"].items()) sum += value.get<double>();
  // d nll / d log p summed over all refs is minus the path length.
  EXPECT_NEAR(sum, -2.0, 1e-14);
}

TEST(CliTest, PosteriorsTensor) {
  const fs::path out = fs::temp_directory_path() / "semirng_cli_posteriors.bin";
  const CliRun r = run("ctc " + case_path("ctc_distill.json") + " --posteriors " + out.string());
  ASSERT_EQ(r.exit_code, 0);
  const Tensor t = read_tensor(out);
  fs::remove(out);
  EXPECT_EQ(t.dims, (std::vector<std::uint64_t>{4, 5}));
  for (std::size_t row = 0; row < 4; ++row) {
    double sum = 0.0;
    for (std::size_t s = 0; s < 5; ++s) sum += t.data[row * 5 + s];
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(CliTest, ExitCodes) {
  const fs::path dir = fs::temp_directory_path();
  const fs::path infeasible = dir / "semirng_cli_infeasible.json";
  std::ofstream(infeasible) << R"({"kind": "ctc", "T": 1, "V": 2, "labels": [1, 1],
      "blank_id": 0, "logits": [[-0.6931471805599453, -0.6931471805599453]]})";
  EXPECT_EQ(run("ctc " + infeasible.string() + " --posteriors " +
                (dir / "semirng_cli_unused.bin").string())
                .exit_code,
            3);
  const CliRun nll = run("ctc " + infeasible.string());
  EXPECT_EQ(nll.exit_code, 0);
  EXPECT_EQ(json::parse(nll.out)["nll"], "inf");
  fs::remove(infeasible);

  EXPECT_EQ(run("ctc " + case_path("missing.json")).exit_code, 2);
  EXPECT_EQ(run("rnnt " + case_path("ctc_uniform.json")).exit_code, 2);
  EXPECT_EQ(run("ctc " + case_path("ctc_uniform.json") + " --semiring nope").exit_code, 2);
  EXPECT_EQ(run("ctc " + case_path("ctc_uniform.json") + " --alpha-ent -1").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
}

TEST(CliTest, Axioms) {
  const CliRun r = run("axioms --trials 300 --seed 5");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(json::parse(r.out)["ok"].get<bool>());
}

TEST(CliTest, BenchAgrees) {
  const CliRun r = run("bench --t 40 --u 12 --semiring log-entropy --repeat 2",
                    "SEMIRNG_THREADS=3");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(json::parse(r.out)["identical"].get<bool>());
}

TEST(CliTest, RepeatedRunsAreByteIdentical) {
  const std::string args[] = {
      "rnnt " + case_path("rnnt_uniform_4x3.json") + " --semiring log-entropy --count-ops --grad",
      "rnnt " + case_path("rnnt_distill.json") + " --entropy --grad --oracle-check",
      "ctc " + case_path("ctc_distill.json") + " --entropy --grad --alpha-ent 0.1",
      "distill " + case_path("rnnt_distill.json") + " --alpha-state 0.3 --alpha-seq 0.7",
  };
  for (const std::string& a : args) {
    const CliRun first = run(a);
    ASSERT_EQ(first.exit_code, 0) << a;
    for (const char* env : {"", "SEMIRNG_THREADS=4", "SEMIRNG_THREADS=2"}) {
      EXPECT_EQ(run(a, env).out, first.out) << a << " " << env;
    }
  }
}

}  // namespace
}  // namespace semirng
