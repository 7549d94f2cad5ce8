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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rspap/error.h"

namespace rspap {
namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "n",         "cluster_sizes",   "s",              "object_count",
      "truncation_level", "property_kind", "seeds",     "dataset_path",
      "intra_vm_range",   "cross_vm_range", "solvers",  "exact_budget",
      "record_runtime"};
  return keys;
}

// Collects problems instead of stopping at the first.
class ConfigReader {
 public:
  explicit ConfigReader(const Json& doc) : doc_(doc) {}

  void Fail(const std::string& key, const std::string& what) {
    errors_.push_back("'" + key + "': " + what);
  }

  template <typename T>
  std::vector<T> List(const char* key, bool required, const std::vector<T>& fallback) {
    if (!doc_.contains(key)) {
      if (required) Fail(key, "is required");
      return fallback;
    }
    const Json& v = doc_.at(key);
    std::vector<T> out;
    try {
      if (v.is_array()) {
        out = v.get<std::vector<T>>();
      } else {
        out.push_back(v.get<T>());
      }
    } catch (const nlohmann::json::exception&) {
      Fail(key, "has the wrong type");
      return fallback;
    }
    if (out.empty()) Fail(key, "must not be empty");
    return out;
  }

  template <typename T>
  T Scalar(const char* key, const T& fallback) {
    if (!doc_.contains(key)) return fallback;
    try {
      return doc_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      Fail(key, "has the wrong type");
      return fallback;
    }
  }

  bool IsInteger(const char* key) const {
    if (!doc_.contains(key)) return true;
    const Json& v = doc_.at(key);
    if (v.is_array()) {
      for (const Json& e : v) {
        if (!e.is_number_integer()) return false;
      }
      return true;
    }
    return v.is_number_integer();
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  const Json& doc_;
  std::vector<std::string> errors_;
};

void CheckRange(ConfigReader* reader, const char* key, const std::vector<double>& range) {
  if (range.size() != 2) reader->Fail(key, "must be [lo, hi]");
}

std::string Join(std::span<const int> values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

std::string RunId(std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", ordinal);
  return buf;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failure on " + path.string());
}

}  // namespace

ExperimentConfig ParseConfig(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kParameter, "config must be a JSON object");
  ConfigReader reader(doc);
  for (const auto& [key, value] : doc.items()) {
    if (!KnownKeys().count(key)) reader.Fail(key, "unknown key");
  }
  ExperimentConfig config;
  if (!reader.IsInteger("n")) reader.Fail("n", "must be integers");
  config.n = reader.List<int>("n", true, {});
  for (int n : config.n) {
    if (n < 1) reader.Fail("n", "role counts must be >= 1");
  }

  if (doc.contains("cluster_sizes")) {
    const Json& v = doc.at("cluster_sizes");
    try {
      if (v.is_array() && !v.empty() && v.front().is_array()) {
        config.cluster_sizes = v.get<std::vector<std::vector<int>>>();
      } else {
        config.cluster_sizes.push_back(v.get<std::vector<int>>());
      }
    } catch (const nlohmann::json::exception&) {
      reader.Fail("cluster_sizes", "must be a list of integers or a list of such lists");
    }
  } else {
    reader.Fail("cluster_sizes", "is required");
  }
  const ClusterCaps caps;
  for (const auto& layout : config.cluster_sizes) {
    if (layout.empty() || static_cast<int>(layout.size()) > caps.max_clusters) {
      reader.Fail("cluster_sizes", "each layout needs 1.." + std::to_string(caps.max_clusters) +
                                       " clusters");
    }
    for (int size : layout) {
      if (size < 1 || size > caps.max_cluster_size) {
        reader.Fail("cluster_sizes", "cluster sizes must lie in 1.." +
                                         std::to_string(caps.max_cluster_size));
      }
    }
  }

  config.s = reader.List<double>("s", true, {});
  for (double s : config.s) {
    if (!(s >= 1.0)) reader.Fail("s", "Zipf parameters must be >= 1");
  }
  if (!reader.IsInteger("object_count")) reader.Fail("object_count", "must be an integer");
  config.object_count = reader.Scalar<std::int64_t>("object_count", config.object_count);
  if (config.object_count < 1) reader.Fail("object_count", "must be >= 1");
  if (!reader.IsInteger("truncation_level")) reader.Fail("truncation_level", "must be an integer");
  config.truncation_level = reader.Scalar<int>("truncation_level", config.truncation_level);
  if (config.truncation_level < 1) reader.Fail("truncation_level", "must be >= 1");

  const auto kinds = reader.List<std::string>("property_kind", false, {"KLD"});
  config.property_kinds.clear();
  for (const std::string& k : kinds) {
    if (const auto kind = ParsePropertyKind(k)) {
      config.property_kinds.push_back(*kind);
    } else {
      reader.Fail("property_kind", "unknown kind '" + k + "' (expected KLD or MI)");
    }
  }

  if (!reader.IsInteger("seeds")) reader.Fail("seeds", "must be non-negative integers");
  config.seeds = reader.List<std::uint64_t>("seeds", true, {});

  if (doc.contains("dataset_path")) {
    config.dataset_path = reader.Scalar<std::string>("dataset_path", "");
  }

  const auto intra = reader.List<double>("intra_vm_range", false,
                                         {config.ranges.intra_lo, config.ranges.intra_hi});
  const auto cross = reader.List<double>("cross_vm_range", false,
                                         {config.ranges.cross_lo, config.ranges.cross_hi});
  CheckRange(&reader, "intra_vm_range", intra);
  CheckRange(&reader, "cross_vm_range", cross);
  if (intra.size() == 2 && cross.size() == 2) {
    config.ranges = {intra[0], intra[1], cross[0], cross[1]};
    if (!(intra[0] > 0.0 && intra[0] <= intra[1] && intra[1] <= 1.0)) {
      reader.Fail("intra_vm_range", "must satisfy 0 < lo <= hi <= 1");
    }
    if (!(cross[0] > 0.0 && cross[0] <= cross[1] && cross[1] < 1.0)) {
      reader.Fail("cross_vm_range", "must satisfy 0 < lo <= hi < 1");
    }
    if (!(cross[1] < intra[0])) {
      reader.Fail("cross_vm_range", "upper bound must stay below the intra-VM lower bound");
    }
  }

  config.solvers = reader.List<std::string>("solvers", false, config.solvers);
  std::set<std::string> seen;
  for (const std::string& solver : config.solvers) {
    if (solver != "tdh" && solver != "nbh" && solver != "exact") {
      reader.Fail("solvers", "unknown solver '" + solver + "' (expected tdh, nbh or exact)");
    }
    if (!seen.insert(solver).second) reader.Fail("solvers", "duplicate solver '" + solver + "'");
  }
  if (!reader.IsInteger("exact_budget")) reader.Fail("exact_budget", "must be an integer");
  config.exact_budget = reader.Scalar<std::uint64_t>("exact_budget", config.exact_budget);
  if (config.exact_budget < 1) reader.Fail("exact_budget", "must be >= 1");
  config.record_runtime = reader.Scalar<bool>("record_runtime", false);

  if (seen.count("exact")) {
    for (int n : config.n) {
      for (const auto& layout : config.cluster_sizes) {
        int m = 0;
        for (int size : layout) m += size;
        double space = 1.0;
        for (int i = 0; i < n; ++i) space *= m;
        if (space > static_cast<double>(config.exact_budget)) {
          reader.Fail("solvers", "exact solver needs m^n <= exact_budget, but n=" +
                                     std::to_string(n) + ", m=" + std::to_string(m) +
                                     " exceeds it");
        }
      }
    }
  }

  if (!reader.errors().empty()) {
    std::string message = "invalid config:";
    for (const std::string& e : reader.errors()) message += "\n  - " + e;
    throw Error(ErrorCode::kParameter, message);
  }
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) { return ParseConfig(ReadJsonFile(path)); }

std::vector<CheckinEntry> LoadCorpus(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.dataset_path) {
    auto entries = ReadMappedDatasetFile(*config.dataset_path);
    if (entries.empty()) {
      throw Error(ErrorCode::kInput, "mapped dataset " + *config.dataset_path + " is empty");
    }
    return entries;
  }
  Rng rng = Rng::Stream(seed, kCorpusStream);
  return GenerateSyntheticEntries(static_cast<std::size_t>(config.object_count), rng);
}

SensitivePropertyProfile BuildProfile(const ExperimentConfig& config, int n, double s,
                                      PropertyKind kind, std::uint64_t seed,
                                      std::span<const CheckinEntry> corpus) {
  Rng workload = Rng::Stream(seed, kWorkloadStream);
  SensitivePropertyProfile profile =
      GenerateWorkload(n, config.object_count, s, config.truncation_level, workload);
  Rng binding = Rng::Stream(seed, kBindingStream);
  BindDataset(&profile, corpus.size(), binding);
  const PropertyContext ctx(corpus, kind);
  EvaluateProfile(&profile, ctx);
  return profile;
}

Assignment RunSolver(const std::string& solver, const DisclosureTable& table,
                     const VulnerabilityMatrix& d, std::uint64_t exact_budget) {
  if (solver == "tdh") return SolveTdh(table, d);
  if (solver == "nbh") return SolveNbh(table, d);
  if (solver == "exact") return SolveExact(table, d, exact_budget).assignment;
  throw Error(ErrorCode::kParameter, "unknown solver '" + solver + "'");
}

std::vector<RunRecord> RunSweep(const ExperimentConfig& config, const SweepOptions& options) {
  const bool shared_corpus = config.dataset_path.has_value();
  std::vector<CheckinEntry> corpus;
  if (shared_corpus) corpus = LoadCorpus(config, 0);

  std::vector<RunRecord> runs;
  std::size_t ordinal = 0;
  for (int n : config.n) {
    for (double s : config.s) {
      for (PropertyKind kind : config.property_kinds) {
        for (std::uint64_t seed : config.seeds) {
          if (!shared_corpus) corpus = LoadCorpus(config, seed);
          const SensitivePropertyProfile profile = BuildProfile(config, n, s, kind, seed, corpus);
          const DisclosureTable table(profile);
          for (const auto& layout : config.cluster_sizes) {
            Rng vuln_rng = Rng::Stream(seed, kVulnerabilityStream);
            const VulnerabilityMatrix d = GenerateVulnMatrix(layout, config.ranges, vuln_rng);
            for (const std::string& solver : config.solvers) {
              RunRecord run;
              run.run_id = RunId(ordinal++);
              run.solver = solver;
              run.n = n;
              run.cluster_sizes = layout;
              run.m = d.m();
              run.s = s;
              run.kind = kind;
              run.seed = seed;
              const auto start = std::chrono::steady_clock::now();
              run.assignment = RunSolver(solver, table, d, config.exact_budget);
              const auto stop = std::chrono::steady_clock::now();
              run.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
              run.report = BuildReport(run.assignment, table, d, profile);
              if (options.on_run) options.on_run(run);
              runs.push_back(std::move(run));
            }
          }
        }
      }
    }
  }
  std::sort(runs.begin(), runs.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.run_id < b.run_id; });

  if (options.out_dir) {
    const std::filesystem::path dir(*options.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir / "runs", ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + (dir / "runs").string());
    WriteText(dir / "results.csv", ResultsCsv(runs, config.record_runtime));
    WriteText(dir / "timings.csv", TimingsCsv(runs));
    for (const RunRecord& run : runs) {
      WriteText(dir / "runs" / (run.run_id + ".json"), RunToJson(run).dump(1) + "\n");
    }
  }
  return runs;
}

std::string ResultsCsv(std::span<const RunRecord> runs, bool record_runtime) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const RunRecord& run : runs) {
    const RiskReport& r = run.report;
    out << run.run_id << ',' << run.solver << ',' << run.n << ',' << run.m << ','
        << FormatDouble(run.s) << ',' << SensitivityClassName(ClassifySensitivity(run.s)) << ','
        << PropertyKindName(run.kind) << ',' << run.seed << ',' << FormatDouble(r.total_risk)
        << ',' << FormatDouble(r.pa) << ',' << (r.delta_defined ? FormatDouble(r.delta) : "")
        << ',' << (r.di_defined ? FormatDouble(r.di) : "") << ','
        << (record_runtime ? FormatDouble(run.runtime_ms) : "") << '\n';
  }
  return out.str();
}

std::string TimingsCsv(std::span<const RunRecord> runs) {
  std::ostringstream out;
  out << "run_id,solver,n,m,runtime_ms\n";
  for (const RunRecord& run : runs) {
    out << run.run_id << ',' << run.solver << ',' << run.n << ',' << run.m << ','
        << FormatDouble(run.runtime_ms) << '\n';
  }
  return out.str();
}

Json RunToJson(const RunRecord& run) {
  Json out;
  out["run_id"] = run.run_id;
  out["solver"] = run.solver;
  out["n"] = run.n;
  out["m"] = run.m;
  out["cluster_sizes"] = run.cluster_sizes;
  out["cluster_layout"] = Join(run.cluster_sizes, 'x');
  out["s"] = run.s;
  out["class"] = SensitivityClassName(ClassifySensitivity(run.s));
  out["property"] = PropertyKindName(run.kind);
  out["seed"] = run.seed;
  out["assignment"] = AssignmentToJson(
      {run.solver, run.seed, run.assignment, run.report.total_risk, run.report.per_role_risk});
  out["report"] = ReportToJson(run.report);
  return out;
}

}  // namespace rspap
