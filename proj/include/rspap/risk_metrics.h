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

// Evaluation metrics for an assignment: property attackability PA, quality
// of risk reduction, per-role reductions and the discrimination index.

#ifndef RSPAP_RISK_METRICS_H_
#define RSPAP_RISK_METRICS_H_

#include <optional>
#include <span>
#include <vector>

#include "rspap/assignment.h"
#include "rspap/lattice.h"
#include "rspap/rbac_policy.h"
#include "rspap/vulnerability.h"

namespace rspap {

// PA = sum of f({r_i}); roles with an empty dataset contribute 0. Throws
// kState when the profile is not evaluated.
double PropertyAttackability(const SensitivePropertyProfile& profile,
                             std::vector<double>* per_role = nullptr);

// (PA - Risk) / PA. Throws kDegenerate when PA <= 0.
double QualityOfRiskReduction(double pa, double total_risk);

// 1 - (sum x)^2 / (n' * sum x^2) over the given reductions; 0 when every
// value is zero. Throws kDegenerate on an empty list.
double DiscriminationIndex(std::span<const double> deltas);

// True when f(A) <= f({i}) for every evaluated set A and every member i
// whose own dataset is non-empty. Under this condition every reduction lies
// in [0, 1].
bool MonotonicityPrecheck(const SensitivePropertyProfile& profile);

struct RiskReport {
  std::vector<double> per_role_risk;
  double total_risk = 0.0;
  std::vector<double> per_role_pa;
  double pa = 0.0;
  // NaN when PA == 0.
  double delta = 0.0;
  bool delta_defined = false;
  // False when delta falls outside [0, 1].
  bool delta_in_range = true;
  // Unset for roles with f({r_i}) == 0.
  std::vector<std::optional<double>> per_role_delta;
  double di = 0.0;
  bool di_defined = false;
  std::vector<RoleId> excluded_roles;
  bool monotone = false;
};

RiskReport BuildReport(const Assignment& a, const DisclosureTable& table,
                       const VulnerabilityMatrix& d, const SensitivePropertyProfile& profile);

}  // namespace rspap

#endif  // RSPAP_RISK_METRICS_H_
