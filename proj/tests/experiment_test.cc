// Copyright 2026 The RSPAP Authors
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

#include "rspap/experiment.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rspap/error.h"

namespace rspap {
namespace {

Json SmallConfig() {
  return Json::parse(R"({
    "n": 6, "cluster_sizes": [[2, 2]], "s": 1.5, "object_count": 600,
    "seeds": [1, 2], "solvers": ["tdh", "nbh"]
  })");
}

std::string ErrorOf(const Json& doc) {
  try {
    ParseConfig(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameter);
    return e.what();
  }
  return "";
}

TEST(ConfigTest, ScalarsPromoteToLists) {
  const ExperimentConfig config = ParseConfig(SmallConfig());
  EXPECT_EQ(config.n, std::vector<int>{6});
  EXPECT_EQ(config.s, std::vector<double>{1.5});
  ASSERT_EQ(config.cluster_sizes.size(), 1u);
  EXPECT_EQ(config.cluster_sizes[0], (std::vector<int>{2, 2}));
  EXPECT_EQ(config.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(config.truncation_level, 3);
  EXPECT_EQ(config.property_kinds, std::vector<PropertyKind>{PropertyKind::kKld});

  Json flat = SmallConfig();
  flat["cluster_sizes"] = {3, 1};
  EXPECT_EQ(ParseConfig(flat).cluster_sizes[0], (std::vector<int>{3, 1}));
}

TEST(ConfigTest, ReportsEveryProblemTogether) {
  Json doc = SmallConfig();
  doc["s"] = 0.5;
  doc["solvers"] = {"tdh", "greedy"};
  doc["colour"] = "blue";
  doc["cross_vm_range"] = {0.2, 0.7};
  const std::string message = ErrorOf(doc);
  EXPECT_NE(message.find("'s'"), std::string::npos) << message;
  EXPECT_NE(message.find("greedy"), std::string::npos) << message;
  EXPECT_NE(message.find("colour"), std::string::npos) << message;
  EXPECT_NE(message.find("cross_vm_range"), std::string::npos) << message;
}

TEST(ConfigTest, MissingKeysAndExactBudget) {
  EXPECT_NE(ErrorOf(Json::object()).find("'n'"), std::string::npos);
  Json doc = SmallConfig();
  doc["n"] = 12;
  doc["cluster_sizes"] = {4};
  doc["solvers"] = {"exact"};
  doc["exact_budget"] = 1000;
  EXPECT_NE(ErrorOf(doc).find("exact"), std::string::npos);
  doc["exact_budget"] = 20'000'000;
  EXPECT_NO_THROW(ParseConfig(doc));
}

TEST(SweepTest, RowsOrderAndDeterminism) {
  const ExperimentConfig config = ParseConfig(SmallConfig());
  const auto runs = RunSweep(config);
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0].run_id, "000000");
  EXPECT_EQ(runs[3].run_id, "000003");
  EXPECT_EQ(runs[0].solver, "tdh");
  EXPECT_EQ(runs[1].solver, "nbh");
  EXPECT_EQ(runs[0].seed, 1u);
  EXPECT_EQ(runs[2].seed, 2u);

  const std::string csv = ResultsCsv(runs, false);
  EXPECT_EQ(csv.rfind(std::string(kResultsHeader) + "\n", 0), 0u);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(line.back(), ',') << "runtime column should be empty: " << line;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(ResultsCsv(RunSweep(config), false), csv);
}

TEST(SweepTest, WritesOutputFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "rspap_sweep_test";
  std::filesystem::remove_all(dir);
  Json doc = SmallConfig();
  doc["seeds"] = 3;
  doc["record_runtime"] = true;
  const auto runs = RunSweep(ParseConfig(doc), SweepOptions{dir.string(), nullptr});
  EXPECT_TRUE(std::filesystem::exists(dir / "results.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "timings.csv"));
  for (const auto& run : runs) {
    EXPECT_TRUE(std::filesystem::exists(dir / "runs" / (run.run_id + ".json")));
  }
  std::ifstream in(dir / "runs" / "000000.json");
  const Json run = Json::parse(in);
  EXPECT_EQ(run.at("solver"), "tdh");
  std::filesystem::remove_all(dir);
}

TEST(SweepTest, VulnerabilityRangesDoNotPerturbTheWorkload) {
  Json doc = SmallConfig();
  const auto base = RunSweep(ParseConfig(doc));
  doc["intra_vm_range"] = {0.7, 0.9};
  doc["cross_vm_range"] = {0.1, 0.2};
  const auto other = RunSweep(ParseConfig(doc));
  ASSERT_EQ(base.size(), other.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    EXPECT_EQ(base[k].report.pa, other[k].report.pa);
    EXPECT_EQ(base[k].report.per_role_pa, other[k].report.per_role_pa);
  }
}

TEST(SweepTest, ExactSolverInSweep) {
  Json doc = SmallConfig();
  doc["n"] = 5;
  doc["solvers"] = {"exact", "tdh", "nbh"};
  const auto runs = RunSweep(ParseConfig(doc));
  ASSERT_EQ(runs.size(), 6u);
  for (std::size_t k = 0; k < runs.size(); k += 3) {
    EXPECT_LE(runs[k].report.total_risk, runs[k + 1].report.total_risk + 1e-12);
    EXPECT_LE(runs[k].report.total_risk, runs[k + 2].report.total_risk + 1e-12);
  }
}

}  // namespace
}  // namespace rspap
