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

// rspap: command-line front end for ingestion, generation, solving,
// evaluation and seeded sweeps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rspap/assignment.h"
#include "rspap/checkin.h"
#include "rspap/error.h"
#include "rspap/experiment.h"
#include "rspap/info_measures.h"
#include "rspap/json_io.h"
#include "rspap/random.h"
#include "rspap/risk_metrics.h"
#include "rspap/vulnerability.h"

namespace rspap {
namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

// --out when given, otherwise default_name under $RSPAP_OUT_DIR (or the
// working directory).
std::filesystem::path OutPath(const std::string& out, const std::string& default_name) {
  if (!out.empty()) return out;
  const char* dir = std::getenv("RSPAP_OUT_DIR");
  return std::filesystem::path(dir && *dir ? dir : ".") / default_name;
}

void EnsureParent(const std::filesystem::path& path) {
  if (!path.has_parent_path()) return;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string());
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

struct Options {
  std::string out;
  std::string config;
  std::uint64_t seed = 1;
  // ingest / gen-checkins
  std::string checkins;
  std::string pois;
  std::size_t count = 20000;
  // monotonicity
  std::string dataset;
  std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int trials = 10;
  // assign / evaluate
  std::string profile;
  std::string vuln;
  std::string assignment;
  std::string solver = "tdh";
  std::uint64_t exact_budget = kDefaultExactBudget;
};

int RunIngest(const Options& opt) {
  ParseStats parse_stats;
  const auto raw = ParseCheckinsFile(opt.checkins, &parse_stats);
  const auto pois = ParsePoisFile(opt.pois);
  if (pois.empty()) std::cerr << "warning: POI file has no entries; every check-in is dropped\n";
  const PoiIndex index(pois);
  MapStats map_stats;
  const auto entries = MapCheckins(raw, index, &map_stats);
  const auto path = OutPath(opt.out, "mapped.csv");
  auto out = OpenOut(path);
  WriteMappedDataset(out, entries);
  std::cout << "lines=" << parse_stats.lines << " malformed=" << parse_stats.skipped
            << " mapped=" << map_stats.mapped << " dropped=" << map_stats.dropped
            << " out=" << path.string() << '\n';
  for (std::size_t line : parse_stats.skipped_line_numbers) {
    std::cerr << "warning: skipped malformed line " << line << '\n';
  }
  return 0;
}

int RunGenCheckins(const Options& opt) {
  Rng rng = Rng::Stream(opt.seed, kCorpusStream);
  const SyntheticCorpus corpus = GenerateSyntheticCorpus(opt.count, rng);
  const std::filesystem::path dir = OutPath(opt.out, "synthetic");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());
  auto checkins = OpenOut(dir / "checkins.txt");
  for (const std::string& line : corpus.checkin_lines) checkins << line << '\n';
  auto pois = OpenOut(dir / "pois.csv");
  pois << "lat,lon,category_id\n";
  for (const PoiRecord& p : corpus.pois) {
    pois << FormatDouble(static_cast<double>(p.lat_e7) / kCoordScale) << ','
         << FormatDouble(static_cast<double>(p.lon_e7) / kCoordScale) << ',' << p.category
         << '\n';
  }
  std::cout << "checkins=" << corpus.checkin_lines.size() << " pois=" << corpus.pois.size()
            << " out=" << dir.string() << '\n';
  return 0;
}

int RunMonotonicity(const Options& opt) {
  const auto entries = ReadMappedDatasetFile(opt.dataset);
  if (opt.trials < 1) throw Error(ErrorCode::kParameter, "--trials must be >= 1");
  const PropertyContext kld(entries, PropertyKind::kKld);
  const PropertyContext mi(entries, PropertyKind::kMi);
  Rng kld_rng = Rng::Stream(opt.seed, "monotonicity");
  Rng mi_rng = Rng::Stream(opt.seed, "monotonicity");
  const auto kld_curve = MonotonicityCurve(kld, opt.fractions, opt.trials, kld_rng);
  const auto mi_curve = MonotonicityCurve(mi, opt.fractions, opt.trials, mi_rng);
  const auto path = OutPath(opt.out, "monotonicity.csv");
  auto out = OpenOut(path);
  out << "fraction,trials,kld,mi\n";
  for (std::size_t k = 0; k < opt.fractions.size(); ++k) {
    out << FormatDouble(opt.fractions[k]) << ',' << opt.trials << ','
        << FormatDouble(kld_curve[k]) << ',' << FormatDouble(mi_curve[k]) << '\n';
  }
  std::cout << "entries=" << entries.size() << " out=" << path.string() << '\n';
  return 0;
}

ExperimentConfig RequireConfig(const Options& opt) {
  if (opt.config.empty()) throw Error(ErrorCode::kParameter, "--config is required");
  return LoadConfig(opt.config);
}

int RunGenWorkload(const Options& opt) {
  const ExperimentConfig config = RequireConfig(opt);
  const auto corpus = LoadCorpus(config, opt.seed);
  const auto profile = BuildProfile(config, config.n.front(), config.s.front(),
                                    config.property_kinds.front(), opt.seed, corpus);
  const auto path = OutPath(opt.out, "profile.json");
  EnsureParent(path);
  WriteJsonFile(path.string(), ProfileToJson(profile));
  if (profile.binding_warning()) {
    std::cerr << "warning: corpus smaller than the workload; records were reused\n";
  }
  std::cout << "n=" << profile.n() << " partitions=" << profile.partitions().size()
            << " lattice_sets=" << profile.lattice().size() << " out=" << path.string() << '\n';
  return 0;
}

int RunGenVuln(const Options& opt) {
  const ExperimentConfig config = RequireConfig(opt);
  Rng rng = Rng::Stream(opt.seed, kVulnerabilityStream);
  const auto d = GenerateVulnMatrix(config.cluster_sizes.front(), config.ranges, rng);
  const auto path = OutPath(opt.out, "vuln.json");
  EnsureParent(path);
  WriteJsonFile(path.string(), VulnToJson(d));
  std::cout << "m=" << d.m() << " out=" << path.string() << '\n';
  return 0;
}

int RunAssign(const Options& opt) {
  const auto profile = ProfileFromJson(ReadJsonFile(opt.profile));
  const auto d = VulnFromJson(ReadJsonFile(opt.vuln));
  const DisclosureTable table(profile);
  const Assignment a = RunSolver(opt.solver, table, d, opt.exact_budget);
  const auto per_role = PerRoleRisk(a, table, d);
  double total = 0.0;
  for (double r : per_role) total += r;
  const auto path = OutPath(opt.out, "assignment.json");
  EnsureParent(path);
  WriteJsonFile(path.string(), AssignmentToJson({opt.solver, opt.seed, a, total, per_role}));
  std::cout << "solver=" << opt.solver << " total_risk=" << FormatDouble(total)
            << " out=" << path.string() << '\n';
  return 0;
}

int RunEvaluate(const Options& opt) {
  const auto profile = ProfileFromJson(ReadJsonFile(opt.profile));
  const auto d = VulnFromJson(ReadJsonFile(opt.vuln));
  const auto doc = AssignmentFromJson(ReadJsonFile(opt.assignment));
  const DisclosureTable table(profile);
  const RiskReport report = BuildReport(doc.assignment, table, d, profile);
  const auto path = OutPath(opt.out, "report.json");
  EnsureParent(path);
  WriteJsonFile(path.string(), ReportToJson(report));
  std::cout << "total_risk=" << FormatDouble(report.total_risk)
            << " pa=" << FormatDouble(report.pa)
            << " delta=" << (report.delta_defined ? FormatDouble(report.delta) : "undefined")
            << " di=" << (report.di_defined ? FormatDouble(report.di) : "undefined")
            << " out=" << path.string() << '\n';
  if (!report.monotone) {
    std::cerr << "warning: profile fails the monotonicity pre-check; delta may leave [0, 1]\n";
  }
  return 0;
}

int RunSweepCommand(const Options& opt) {
  const ExperimentConfig config = RequireConfig(opt);
  const auto dir = OutPath(opt.out, "sweep");
  SweepOptions options;
  options.out_dir = dir.string();
  options.on_run = [](const RunRecord& run) {
    std::cerr << "run " << run.run_id << " " << run.solver << " n=" << run.n << " m=" << run.m
              << " s=" << FormatDouble(run.s) << " seed=" << run.seed << '\n';
  };
  const auto runs = RunSweep(config, options);
  std::cout << "runs=" << runs.size() << " out=" << dir.string() << '\n';
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Risk-aware role-to-VM assignment toolkit"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&opt](CLI::App* cmd, const std::string& out_help) {
    cmd->add_option("--out", opt.out, out_help);
    cmd->add_option("--seed", opt.seed, "Run seed")->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "Map raw check-ins to (category, slot) entries");
  ingest->add_option("--checkins", opt.checkins, "Tab-separated check-in file")->required();
  ingest->add_option("--pois", opt.pois, "POI file: lat,lon,category_id")->required();
  add_common(ingest, "Mapped dataset CSV");

  auto* gen_checkins = app.add_subcommand("gen-checkins", "Write a synthetic check-in corpus");
  gen_checkins->add_option("--count", opt.count, "Number of check-ins")->capture_default_str();
  add_common(gen_checkins, "Output directory");

  auto* mono = app.add_subcommand("monotonicity", "Mean KLD/MI over random corpus fractions");
  mono->add_option("--dataset", opt.dataset, "Mapped dataset CSV")->required();
  mono->add_option("--fractions", opt.fractions, "Ascending fractions in (0, 1]")
      ->delimiter(',');
  mono->add_option("--trials", opt.trials, "Subsets per fraction")->capture_default_str();
  add_common(mono, "Curve CSV");

  auto* gen_workload =
      app.add_subcommand("gen-workload", "Generate, bind and evaluate a property profile");
  gen_workload->add_option("--config", opt.config, "Experiment config (first n, s, property)");
  add_common(gen_workload, "Profile JSON");

  auto* gen_vuln = app.add_subcommand("gen-vuln", "Generate a vulnerability matrix");
  gen_vuln->add_option("--config", opt.config, "Experiment config (first cluster layout)");
  add_common(gen_vuln, "Vulnerability JSON");

  auto* assign = app.add_subcommand("assign", "Assign roles to VMs");
  assign->add_option("--profile", opt.profile, "Profile JSON")->required();
  assign->add_option("--vuln", opt.vuln, "Vulnerability JSON")->required();
  assign->add_option("--solver", opt.solver, "tdh, nbh or exact")
      ->check(CLI::IsMember({"tdh", "nbh", "exact"}))
      ->capture_default_str();
  assign->add_option("--exact-budget", opt.exact_budget, "Largest m^n the exact solver tries")
      ->capture_default_str();
  add_common(assign, "Assignment JSON");

  auto* evaluate = app.add_subcommand("evaluate", "Risk report of an assignment");
  evaluate->add_option("--profile", opt.profile, "Profile JSON")->required();
  evaluate->add_option("--vuln", opt.vuln, "Vulnerability JSON")->required();
  evaluate->add_option("--assignment", opt.assignment, "Assignment JSON")->required();
  add_common(evaluate, "Report JSON");

  auto* sweep = app.add_subcommand("sweep", "Run a seeded parameter sweep");
  sweep->add_option("--config", opt.config, "Experiment config")->required();
  add_common(sweep, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*ingest) return RunIngest(opt);
    if (*gen_checkins) return RunGenCheckins(opt);
    if (*mono) return RunMonotonicity(opt);
    if (*gen_workload) return RunGenWorkload(opt);
    if (*gen_vuln) return RunGenVuln(opt);
    if (*assign) return RunAssign(opt);
    if (*evaluate) return RunEvaluate(opt);
    if (*sweep) return RunSweepCommand(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return e.IsValidationError() ? kExitValidation : kExitRuntime;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace
}  // namespace rspap

int main(int argc, char** argv) { return rspap::Main(argc, argv); }
