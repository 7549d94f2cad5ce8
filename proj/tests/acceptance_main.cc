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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when
// any criterion fails. Set RSPAP_MIDWEST_DATASET to a mapped check-in CSV
// to add the global cell-probability check to criterion 9.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rspap/assignment.h"
#include "rspap/checkin.h"
#include "rspap/error.h"
#include "rspap/experiment.h"
#include "rspap/info_measures.h"
#include "rspap/rbac_policy.h"
#include "rspap/risk_metrics.h"
#include "rspap/vulnerability.h"
#include "rspap/zipf.h"
#include "test_util.h"

namespace rspap {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Rounding slack when two code paths sum the same terms in different orders.
double SumSlack(double value) { return 1e-12 * std::max(1.0, std::abs(value)); }

// Reports from every run; criterion 6 inspects all of them.
std::vector<RiskReport>& AllReports() {
  static std::vector<RiskReport> reports;
  return reports;
}

RiskReport Report(const Assignment& a, const DisclosureTable& table, const VulnerabilityMatrix& d,
                  const SensitivePropertyProfile& profile) {
  RiskReport report = BuildReport(a, table, d, profile);
  AllReports().push_back(report);
  return report;
}

// 1: heuristics never beat the exhaustive optimum.
Outcome OracleDominance() {
  const Stopwatch watch;
  Outcome out;
  double tdh_ratio = 0.0, nbh_ratio = 0.0;
  int ratios = 0, tdh_optimal = 0, nbh_optimal = 0;
  const std::vector<std::vector<int>> layouts2 = {{2}, {1, 1}};
  const std::vector<std::vector<int>> layouts3 = {{3}, {2, 1}, {1, 1, 1}};
  const double exponents[] = {1.0, 1.5, 2.0};
  for (int k = 0; k < 200; ++k) {
    const int n = 4 + k % 4;
    const int m = 2 + (k / 4) % 2;
    const std::uint64_t seed = 1000 + k;
    SensitivePropertyProfile profile(1, 1, 1.0, {Partition{{0}, 1, {}}});
    VulnerabilityMatrix d;
    if (k % 2 == 0) {
      // Pipeline profile over a synthetic check-in corpus.
      ExperimentConfig config;
      config.object_count = 2000;
      config.property_kinds = {(k / 8) % 2 == 0 ? PropertyKind::kKld : PropertyKind::kMi};
      const auto corpus = LoadCorpus(config, seed);
      profile = BuildProfile(config, n, exponents[k % 3], config.property_kinds[0], seed, corpus);
      const auto& layouts = m == 2 ? layouts2 : layouts3;
      Rng vuln = Rng::Stream(seed, kVulnerabilityStream);
      d = GenerateVulnMatrix(layouts[(k / 8) % layouts.size()], VulnRanges{}, vuln);
    } else {
      auto instance = testing::MakeSyntheticInstance(n, m, seed);
      profile = std::move(instance.profile);
      d = std::move(instance.d);
    }
    const DisclosureTable table(profile);
    const ExactResult exact = SolveExact(table, d);
    const testing::OracleOptimum oracle = testing::OracleExact(profile, d);
    const double opt = TotalRisk(exact.assignment, table, d);
    if (std::abs(opt - oracle.total_risk) > SumSlack(opt)) {
      out.pass = false;
      out.detail = Fmt("instance %.0f: exact %.17g vs oracle %.17g", k, opt, oracle.total_risk);
      return out;
    }
    const double tdh = Report(SolveTdh(table, d), table, d, profile).total_risk;
    const double nbh = Report(SolveNbh(table, d), table, d, profile).total_risk;
    Report(exact.assignment, table, d, profile);
    if (tdh < opt - SumSlack(opt) || nbh < opt - SumSlack(opt)) {
      out.pass = false;
      out.detail = Fmt("instance %.0f below optimum: opt %.17g tdh %.17g nbh %.17g", k, opt, tdh,
                       nbh);
      return out;
    }
    tdh_optimal += tdh <= opt + SumSlack(opt);
    nbh_optimal += nbh <= opt + SumSlack(opt);
    if (opt > 0.0) {
      tdh_ratio += tdh / opt;
      nbh_ratio += nbh / opt;
      ++ratios;
    }
  }
  const double seconds = watch.Seconds();
  out.pass = seconds < 300.0;
  out.detail = Fmt("200 instances; mean ratio TDH %.4f NBH %.4f; ", tdh_ratio / ratios,
                   nbh_ratio / ratios) +
               Fmt("optimal TDH %.0f NBH %.0f; %.1fs (limit 300s)", tdh_optimal, nbh_optimal,
                   seconds);
  return out;
}

// 2: TDH at least as good as NBH in most desk-scale instances and on average.
Outcome TdhVersusNbh() {
  const Stopwatch watch;
  int wins = 0;
  double tdh_sum = 0.0, nbh_sum = 0.0;
  const std::vector<int> layout = EvenClusterLayout(10);
  for (int k = 0; k < 100; ++k) {
    const PropertyKind kind = k % 2 == 0 ? PropertyKind::kKld : PropertyKind::kMi;
    const std::uint64_t seed = 1 + k / 2;
    ExperimentConfig config;
    const double s = (k / 2) % 2 == 0 ? 1.2 : 2.0;
    const auto corpus = LoadCorpus(config, seed);
    const auto profile = BuildProfile(config, 30, s, kind, seed, corpus);
    Rng vuln = Rng::Stream(seed, kVulnerabilityStream);
    const auto d = GenerateVulnMatrix(layout, VulnRanges{}, vuln);
    const DisclosureTable table(profile);
    const double tdh = Report(SolveTdh(table, d), table, d, profile).total_risk;
    const double nbh = Report(SolveNbh(table, d), table, d, profile).total_risk;
    wins += tdh <= nbh;
    tdh_sum += tdh;
    nbh_sum += nbh;
  }
  const double seconds = watch.Seconds();
  Outcome out;
  out.pass = wins >= 60 && tdh_sum <= nbh_sum && seconds < 600.0;
  out.detail = Fmt("TDH <= NBH in %.0f/100 (need 60); mean TDH %.6g NBH %.6g; ", wins,
                   tdh_sum / 100, nbh_sum / 100) +
               Fmt("%.1fs (limit 600s)", seconds);
  return out;
}

// Means of one sweep keyed by (solver, s, n or m).
struct SweepMeans {
  std::map<std::tuple<std::string, double, int>, double> risk;
  std::map<std::tuple<std::string, double, int>, double> delta;
  int out_of_range = 0;
  int monotone_runs = 0;
  double seconds = 0.0;
};

SweepMeans RunTrendSweep(const Json& doc, bool key_by_m) {
  const Stopwatch watch;
  SweepMeans means;
  std::map<std::tuple<std::string, double, int>, int> counts;
  SweepOptions options;
  options.on_run = [&](const RunRecord& run) {
    AllReports().push_back(run.report);
    const auto key = std::make_tuple(run.solver, run.s, key_by_m ? run.m : run.n);
    means.risk[key] += run.report.total_risk;
    means.delta[key] += run.report.delta;
    ++counts[key];
    if (run.report.monotone) {
      ++means.monotone_runs;
      if (!(run.report.delta >= 0.0 && run.report.delta <= 1.0)) ++means.out_of_range;
    }
  };
  RunSweep(ParseConfig(doc), options);
  for (auto& [key, v] : means.risk) v /= counts[key];
  for (auto& [key, v] : means.delta) v /= counts[key];
  means.seconds = watch.Seconds();
  return means;
}

const std::vector<int> kNs = {30, 60, 90, 120, 150};
const std::vector<int> kMs = {2, 4, 8, 16, 32};
const std::vector<double> kExponents = {1.2, 2.0};
const std::vector<std::string> kHeuristics = {"tdh", "nbh"};

Json TrendConfig() {
  Json doc;
  doc["s"] = kExponents;
  doc["property_kind"] = "KLD";
  doc["seeds"] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  doc["solvers"] = kHeuristics;
  return doc;
}

SweepMeans& SweepOverN() {
  static SweepMeans means = [] {
    Json doc = TrendConfig();
    doc["n"] = kNs;
    doc["cluster_sizes"] = Json::array({EvenClusterLayout(30)});
    return RunTrendSweep(doc, false);
  }();
  return means;
}

SweepMeans& SweepOverM() {
  static SweepMeans means = [] {
    Json doc = TrendConfig();
    doc["n"] = 150;
    Json layouts = Json::array();
    for (int m : kMs) layouts.push_back(EvenClusterLayout(m));
    doc["cluster_sizes"] = layouts;
    return RunTrendSweep(doc, true);
  }();
  return means;
}

// Checks consecutive means along `axis`; `rising` selects the direction.
void CheckTrend(const std::map<std::tuple<std::string, double, int>, double>& means,
                const std::vector<int>& axis, bool rising, const char* label, Outcome* out,
                std::ostringstream* detail) {
  for (const auto& solver : kHeuristics) {
    for (double s : kExponents) {
      *detail << solver << " s=" << s << " " << label << ":";
      for (std::size_t k = 0; k < axis.size(); ++k) {
        const double v = means.at({solver, s, axis[k]});
        *detail << " " << Fmt("%.4g", v);
        if (k == 0) continue;
        const double prev = means.at({solver, s, axis[k - 1]});
        if (rising ? v < prev : v > prev) {
          out->pass = false;
          *detail << "(!)";
        }
      }
      *detail << "; ";
    }
  }
}

// 3: risk grows with n at m = 30, and HSD exceeds LSD.
Outcome RiskVersusN() {
  const SweepMeans& means = SweepOverN();
  Outcome out;
  std::ostringstream detail;
  CheckTrend(means.risk, kNs, true, "risk", &out, &detail);
  int hsd_above = 0;
  for (const auto& solver : kHeuristics) {
    for (int n : kNs) {
      const bool above = means.risk.at({solver, 2.0, n}) > means.risk.at({solver, 1.2, n});
      hsd_above += above;
      if (!above) out.pass = false;
    }
  }
  detail << "HSD > LSD at " << hsd_above << "/" << 2 * kNs.size() << " (solver, n) points; "
         << Fmt("%.1fs", means.seconds);
  out.detail = detail.str();
  return out;
}

// 4: risk shrinks with m at n = 150.
Outcome RiskVersusM() {
  const SweepMeans& means = SweepOverM();
  Outcome out;
  std::ostringstream detail;
  CheckTrend(means.risk, kMs, false, "risk", &out, &detail);
  detail << Fmt("%.1fs", means.seconds);
  out.detail = detail.str();
  return out;
}

// 5: delta falls with n, rises with m, and stays in [0, 1] on monotone runs.
Outcome DeltaTrends() {
  const SweepMeans& by_n = SweepOverN();
  const SweepMeans& by_m = SweepOverM();
  Outcome out;
  std::ostringstream detail;
  CheckTrend(by_n.delta, kNs, false, "delta(n)", &out, &detail);
  CheckTrend(by_m.delta, kMs, true, "delta(m)", &out, &detail);
  const int out_of_range = by_n.out_of_range + by_m.out_of_range;
  const int monotone = by_n.monotone_runs + by_m.monotone_runs;
  if (out_of_range > 0) out.pass = false;
  detail << "delta outside [0,1] on " << out_of_range << " of " << monotone << " monotone runs";
  out.detail = detail.str();
  return out;
}

// 6: DI bounds on every run recorded above plus constructed equal-delta cases.
Outcome DiBounds() {
  Outcome out;
  int checked = 0, violations = 0, equal_cases = 0, negative_delta_runs = 0;
  int violations_without_negative = 0;
  std::string first;
  for (const RiskReport& report : AllReports()) {
    if (!report.di_defined) continue;
    std::vector<double> deltas;
    for (const auto& di : report.per_role_delta) {
      if (di) deltas.push_back(*di);
    }
    const double n_prime = static_cast<double>(deltas.size());
    ++checked;
    const bool negative =
        std::any_of(deltas.begin(), deltas.end(), [](double x) { return x < 0.0; });
    negative_delta_runs += negative;
    const double upper = 1.0 - 1.0 / n_prime;
    const bool bounded = report.di >= 0.0 && report.di <= upper + SumSlack(upper);
    const bool equal = std::all_of(deltas.begin(), deltas.end(),
                                   [&](double x) { return x == deltas[0]; });
    equal_cases += equal;
    if (!bounded || (equal && report.di != 0.0)) {
      violations_without_negative += !negative;
      if (violations++ == 0) {
        first = Fmt("first: DI %.6g with n' %.0f, bound %.6g", report.di, n_prime, upper);
      }
    }
  }
  // Zero leakage gives every role delta = 1.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto instance = testing::MakeSyntheticInstance(8, 4, seed);
    const DisclosureTable table(instance.profile);
    const VulnerabilityMatrix zero(std::vector<int>{2, 2}, std::vector<double>(16, 0.0));
    const RiskReport report = BuildReport(SolveTdh(table, zero), table, zero, instance.profile);
    ++equal_cases;
    if (report.di != 0.0) ++violations;
  }
  out.pass = violations == 0 && checked > 0;
  out.detail = std::to_string(checked) + " runs checked, " + std::to_string(equal_cases) +
               " equal-delta cases, " + std::to_string(violations) + " violations; " +
               std::to_string(negative_delta_runs) + " runs with some delta_i < 0, " +
               std::to_string(violations_without_negative) +
               " violations among runs with every delta_i >= 0" +
               (first.empty() ? "" : "; " + first);
  return out;
}

std::vector<double> RandomPmf(int size, Rng& rng, bool allow_zeros) {
  std::vector<double> p(size);
  double total = 0.0;
  for (double& x : p) {
    x = allow_zeros && rng.Uniform01() < 0.2 ? 0.0 : rng.Uniform01() + 1e-3;
    total += x;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (double& x : p) x /= total;
  return p;
}

// 7: information-measure identities over random pmfs.
Outcome InformationIdentities() {
  const Stopwatch watch;
  Rng rng = Rng::Stream(7, "identities");
  constexpr double kTol = 1e-9;
  int failures = 0;
  double worst = 0.0;
  auto check = [&](bool ok, double error) {
    worst = std::max(worst, error);
    failures += !ok;
  };
  for (int trial = 0; trial < 10000; ++trial) {
    const int rows = 1 + static_cast<int>(rng.UniformIndex(15));
    const int cols = 1 + static_cast<int>(rng.UniformIndex(6));
    const int size = rows * cols;
    const auto p = RandomPmf(size, rng, true);
    const auto q = RandomPmf(size, rng, false);
    const double kl = KlDivergence(p, q);
    check(kl >= -kTol, std::max(0.0, -kl));
    const double self = KlDivergence(p, p);
    check(std::abs(self) <= kTol, std::abs(self));

    std::vector<double> row_marginal(rows, 0.0), col_marginal(cols, 0.0);
    std::vector<double> transpose(size);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        row_marginal[r] += p[r * cols + c];
        col_marginal[c] += p[r * cols + c];
        transpose[c * rows + r] = p[r * cols + c];
      }
    }
    std::vector<double> product(size);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) product[r * cols + c] = row_marginal[r] * col_marginal[c];
    }
    const double mi = MutualInformation(p, rows, cols);
    const double via_kl = KlDivergence(p, product);
    check(std::abs(mi - via_kl) <= kTol, std::abs(mi - via_kl));
    const double mi_t = MutualInformation(transpose, cols, rows);
    check(std::abs(mi - mi_t) <= kTol, std::abs(mi - mi_t));
    const double cap = std::min(Entropy(row_marginal), Entropy(col_marginal));
    check(mi >= -kTol, std::max(0.0, -mi));
    check(mi <= cap + kTol, std::max(0.0, mi - cap));
  }
  const double seconds = watch.Seconds();
  Outcome out;
  out.pass = failures == 0 && seconds < 60.0;
  out.detail = Fmt("10000 pmfs, %.0f failures, worst error %.3g; %.2fs (limit 60s)", failures,
                   worst, seconds);
  return out;
}

// 8: level-bucket calibration at s = 1 and the class thresholds.
Outcome ZipfCalibration() {
  Rng rng = Rng::Stream(8, kWorkloadStream);
  const auto profile = GenerateWorkload(30, 1'000'000, 1.0, 3, rng);
  const auto totals = LevelTotals(profile);
  const double ratio = static_cast<double>(totals[1]) / static_cast<double>(totals[2]);
  const bool ratio_ok = std::abs(ratio - 2.0) <= 0.05 * 2.0;

  const std::vector<std::pair<double, SensitivityClass>> cases = {
      {2.0, SensitivityClass::kHsd},        {3.5, SensitivityClass::kHsd},
      {1.7, SensitivityClass::kMsd},        {1.5, SensitivityClass::kMsd},
      {std::nextafter(2.0, 0.0), SensitivityClass::kMsd},
      {1.0, SensitivityClass::kLsd},        {std::nextafter(1.5, 0.0), SensitivityClass::kLsd}};
  int class_errors = 0;
  for (const auto& [s, expected] : cases) class_errors += ClassifySensitivity(s) != expected;
  try {
    ClassifySensitivity(0.99);
    ++class_errors;
  } catch (const Error& e) {
    class_errors += e.code() != ErrorCode::kParameter;
  }
  Outcome out;
  out.pass = ratio_ok && class_errors == 0;
  out.detail = Fmt("bucket1/bucket2 = %.0f/%.0f = %.4f (2.0 +/- 5%%); ", totals[1], totals[2],
                   ratio) +
               std::to_string(class_errors) + " classification errors";
  return out;
}

int NonIncreasingSteps(const std::vector<double>& curve) {
  int steps = 0;
  for (std::size_t k = 1; k < curve.size(); ++k) steps += curve[k] <= curve[k - 1];
  return steps;
}

// 9: property values fall as the sampled fraction of the corpus grows.
Outcome MonotonicityStudy() {
  Rng corpus_rng = Rng::Stream(9, kCorpusStream);
  const SyntheticCorpus corpus = GenerateSyntheticCorpus(20000, corpus_rng);
  std::string text;
  for (const auto& line : corpus.checkin_lines) text += line + "\n";
  std::istringstream in(text);
  ParseStats parse_stats;
  const auto raw = ParseCheckins(in, &parse_stats);
  MapStats map_stats;
  const auto entries = MapCheckins(raw, PoiIndex(corpus.pois), &map_stats);

  std::vector<double> fractions;
  for (int k = 1; k <= 10; ++k) fractions.push_back(k / 10.0);
  Outcome out;
  out.pass = entries.size() >= 10000;
  std::ostringstream detail;
  detail << entries.size() << " mapped entries";
  for (PropertyKind kind : {PropertyKind::kKld, PropertyKind::kMi}) {
    const PropertyContext ctx(entries, kind);
    Rng rng = Rng::Stream(9, "monotonicity");
    const auto curve = MonotonicityCurve(ctx, fractions, 10, rng);
    const int steps = NonIncreasingSteps(curve);
    if (steps < 8) out.pass = false;
    detail << "; " << PropertyKindName(kind) << " non-increasing in " << steps << "/9 steps";
  }
  if (const char* path = std::getenv("RSPAP_MIDWEST_DATASET")) {
    const auto midwest = ReadMappedDatasetFile(path);
    const double p = EstimateJointPmf(midwest).at(5, 3);
    if (std::abs(p - 0.079) > 0.03) out.pass = false;
    detail << Fmt("; P(restaurants, slot 3) = %.4f (0.079 +/- 0.03)", p);
  }
  out.detail = detail.str();
  return out;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// 10: a config re-run reproduces the results CSV byte for byte.
Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() / "rspap_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "config.json";
  std::ofstream(config) << R"({
  "n": [6, 20], "cluster_sizes": [[2, 2], [3, 3, 2]], "s": [1.2, 2.0],
  "property_kind": ["KLD", "MI"], "seeds": [1, 2, 3], "object_count": 5000,
  "solvers": ["tdh", "nbh"]
})";
  SweepOptions first{(root / "a").string(), nullptr};
  SweepOptions second{(root / "b").string(), nullptr};
  const auto runs = RunSweep(LoadConfig(config.string()), first);
  RunSweep(LoadConfig(config.string()), second);
  const std::string a = ReadFile(root / "a" / "results.csv");
  const std::string b = ReadFile(root / "b" / "results.csv");
  Outcome out;
  out.pass = !a.empty() && a == b;
  out.detail = std::to_string(runs.size()) + " runs, " + std::to_string(a.size()) +
               " bytes, " + (a == b ? "identical" : "different");
  fs::remove_all(root);
  return out;
}

}  // namespace
}  // namespace rspap

int main() {
  using rspap::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 oracle dominance", rspap::OracleDominance},
      {"2 TDH vs NBH", rspap::TdhVersusNbh},
      {"3 risk vs n", rspap::RiskVersusN},
      {"4 risk vs m", rspap::RiskVersusM},
      {"5 delta trends", rspap::DeltaTrends},
      {"6 DI bounds", rspap::DiBounds},
      {"7 information identities", rspap::InformationIdentities},
      {"8 Zipf calibration", rspap::ZipfCalibration},
      {"9 monotonicity study", rspap::MonotonicityStudy},
      {"10 determinism", rspap::Determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    std::printf("[%s] %s: %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
