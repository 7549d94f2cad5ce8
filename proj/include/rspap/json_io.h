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

// JSON documents for profiles, vulnerability matrices, assignments and risk
// reports.

#ifndef RSPAP_JSON_IO_H_
#define RSPAP_JSON_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rspap/assignment.h"
#include "rspap/rbac_policy.h"
#include "rspap/risk_metrics.h"
#include "rspap/vulnerability.h"

namespace rspap {

using Json = nlohmann::json;

// {n, L, s, property_kind, corpus_size, partitions: [{roles, cardinality,
// property_value, entry_ids}]}. Every role set of size <= L is listed (with
// cardinality 0 when no object lives exactly there) together with every
// generated partition above L, in lexicographic order. property_value is
// null for sets above L and for unevaluated profiles.
Json ProfileToJson(const SensitivePropertyProfile& profile);
// Throws kFormat on schema violations.
SensitivePropertyProfile ProfileFromJson(const Json& doc);

// {m, cluster_sizes, d}
Json VulnToJson(const VulnerabilityMatrix& d);
VulnerabilityMatrix VulnFromJson(const Json& doc);

struct AssignmentDocument {
  std::string heuristic;
  std::uint64_t seed = 0;
  Assignment assignment;
  double total_risk = 0.0;
  std::vector<double> per_role_risk;
};

// {heuristic, seed, vm_of, total_risk, per_role_risk}
Json AssignmentToJson(const AssignmentDocument& doc);
AssignmentDocument AssignmentFromJson(const Json& doc);

Json ReportToJson(const RiskReport& report);

// Shortest decimal that round-trips; "nan"/"inf" for non-finite values.
std::string FormatDouble(double v);

// Throw kIo for unreadable/unwritable files and kFormat for invalid JSON.
Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& doc);

}  // namespace rspap

#endif  // RSPAP_JSON_IO_H_
