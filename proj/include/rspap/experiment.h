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

// Seeded experiment sweeps: configuration, per-run pipeline (workload,
// binding, profile evaluation, vulnerability matrix, solver, report) and
// CSV/JSON output.

#ifndef RSPAP_EXPERIMENT_H_
#define RSPAP_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rspap/assignment.h"
#include "rspap/checkin.h"
#include "rspap/info_measures.h"
#include "rspap/json_io.h"
#include "rspap/rbac_policy.h"
#include "rspap/risk_metrics.h"
#include "rspap/vulnerability.h"

namespace rspap {

inline constexpr char kResultsHeader[] =
    "run_id,solver,n,m,s,class,property,seed,total_risk,pa,delta,di,runtime_ms";

struct ExperimentConfig {
  std::vector<int> n;
  std::vector<std::vector<int>> cluster_sizes;
  std::vector<double> s;
  std::int64_t object_count = 20000;
  int truncation_level = 3;
  std::vector<PropertyKind> property_kinds = {PropertyKind::kKld};
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> dataset_path;
  VulnRanges ranges;
  std::vector<std::string> solvers = {"tdh", "nbh"};
  std::uint64_t exact_budget = kDefaultExactBudget;
  bool record_runtime = false;
};

// Scalars are accepted where lists are allowed. Unknown keys and every other
// problem are reported together in one kParameter error.
ExperimentConfig ParseConfig(const Json& doc);
ExperimentConfig LoadConfig(const std::string& path);

// Named random streams of one run.
inline constexpr char kWorkloadStream[] = "workload";
inline constexpr char kBindingStream[] = "binding";
inline constexpr char kVulnerabilityStream[] = "vulnerability";
inline constexpr char kCorpusStream[] = "corpus";

// The mapped dataset at dataset_path, or a synthetic corpus of object_count
// entries drawn from the seed's corpus stream.
std::vector<CheckinEntry> LoadCorpus(const ExperimentConfig& config, std::uint64_t seed);

// Workload + binding + evaluation for one (n, s, kind, seed).
SensitivePropertyProfile BuildProfile(const ExperimentConfig& config, int n, double s,
                                      PropertyKind kind, std::uint64_t seed,
                                      std::span<const CheckinEntry> corpus);

// solver is one of "tdh", "nbh", "exact".
Assignment RunSolver(const std::string& solver, const DisclosureTable& table,
                     const VulnerabilityMatrix& d, std::uint64_t exact_budget);

struct RunRecord {
  std::string run_id;
  std::string solver;
  int n = 0;
  std::vector<int> cluster_sizes;
  int m = 0;
  double s = 0.0;
  PropertyKind kind = PropertyKind::kKld;
  std::uint64_t seed = 0;
  Assignment assignment;
  RiskReport report;
  double runtime_ms = 0.0;
};

struct SweepOptions {
  // When set, results.csv, timings.csv and runs/<run_id>.json go here.
  std::optional<std::string> out_dir;
  std::function<void(const RunRecord&)> on_run;
};

// Runs the cartesian product n x s x property x seed x cluster layout x
// solver in that nesting order; run ids are zero-padded ordinals in the
// same order.
std::vector<RunRecord> RunSweep(const ExperimentConfig& config, const SweepOptions& options = {});

// Results CSV with kResultsHeader. runtime_ms is left empty unless
// record_runtime is set, so identical configs give identical bytes.
std::string ResultsCsv(std::span<const RunRecord> runs, bool record_runtime);
std::string TimingsCsv(std::span<const RunRecord> runs);
Json RunToJson(const RunRecord& run);

}  // namespace rspap

#endif  // RSPAP_EXPERIMENT_H_
