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

#include "rspap/risk_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rspap/error.h"

namespace rspap {

double PropertyAttackability(const SensitivePropertyProfile& profile,
                             std::vector<double>* per_role) {
  if (!profile.evaluated()) throw Error(ErrorCode::kState, "profile has not been evaluated");
  double pa = 0.0;
  if (per_role) per_role->assign(profile.n(), 0.0);
  for (RoleId i = 0; i < profile.n(); ++i) {
    const double f = profile.values()[i];
    pa += f;
    if (per_role) (*per_role)[i] = f;
  }
  return pa;
}

double QualityOfRiskReduction(double pa, double total_risk) {
  if (!(pa > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "quality of risk reduction is undefined for PA = 0");
  }
  return (pa - total_risk) / pa;
}

double DiscriminationIndex(std::span<const double> deltas) {
  if (deltas.empty()) {
    throw Error(ErrorCode::kDegenerate, "discrimination index of an empty role list");
  }
  // Equal reductions are perfectly proportional; return the exact 0 rather
  // than a rounding residue.
  if (std::all_of(deltas.begin(), deltas.end(), [&](double x) { return x == deltas[0]; })) {
    return 0.0;
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : deltas) {
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) return 0.0;
  return 1.0 - (sum * sum) / (static_cast<double>(deltas.size()) * sum_sq);
}

bool MonotonicityPrecheck(const SensitivePropertyProfile& profile) {
  if (!profile.evaluated()) throw Error(ErrorCode::kState, "profile has not been evaluated");
  const LatticeIndex& lattice = profile.lattice();
  const auto values = profile.values();
  const auto empty = profile.empty_flags();
  std::vector<RoleId> members;
  for (std::size_t index = profile.n(); index < lattice.size(); ++index) {
    lattice.Unrank(index, &members);
    for (RoleId i : members) {
      if (!empty[i] && values[index] > values[i]) return false;
    }
  }
  return true;
}

RiskReport BuildReport(const Assignment& a, const DisclosureTable& table,
                       const VulnerabilityMatrix& d, const SensitivePropertyProfile& profile) {
  if (profile.n() != table.n()) {
    throw Error(ErrorCode::kParameter, "profile and disclosure table disagree on n");
  }
  RiskReport report;
  report.per_role_risk = PerRoleRisk(a, table, d);
  for (double r : report.per_role_risk) report.total_risk += r;
  report.pa = PropertyAttackability(profile, &report.per_role_pa);
  if (report.pa > 0.0) {
    report.delta = QualityOfRiskReduction(report.pa, report.total_risk);
    report.delta_defined = true;
    report.delta_in_range = report.delta >= 0.0 && report.delta <= 1.0;
  } else {
    report.delta = std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> included;
  report.per_role_delta.resize(profile.n());
  for (RoleId i = 0; i < profile.n(); ++i) {
    const double f = report.per_role_pa[i];
    if (f == 0.0) {
      report.excluded_roles.push_back(i);
      continue;
    }
    const double di = (f - report.per_role_risk[i]) / f;
    report.per_role_delta[i] = di;
    included.push_back(di);
  }
  if (!included.empty()) {
    report.di = DiscriminationIndex(included);
    report.di_defined = true;
  } else {
    report.di = std::numeric_limits<double>::quiet_NaN();
  }
  report.monotone = MonotonicityPrecheck(profile);
  return report;
}

}  // namespace rspap
