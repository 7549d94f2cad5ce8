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

#include "rspap/json_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rspap/error.h"

namespace rspap {
namespace {

[[noreturn]] void FormatFailure(const std::string& what) {
  throw Error(ErrorCode::kFormat, what);
}

const Json& Field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) FormatFailure(std::string("missing field '") + key + "'");
  return doc.at(key);
}

template <typename T>
T As(const Json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    FormatFailure(std::string("field '") + key + "' has the wrong type");
  }
}

Json NumberOrNull(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Json ProfileToJson(const SensitivePropertyProfile& profile) {
  const LatticeIndex& lattice = profile.lattice();
  std::map<RoleSet, std::pair<const Partition*, std::size_t>> rows;
  constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);
  for (std::size_t index = 0; index < lattice.size(); ++index) {
    rows.emplace(lattice.SetAt(index), std::make_pair(nullptr, index));
  }
  for (const Partition& p : profile.partitions()) {
    auto [it, inserted] = rows.try_emplace(p.roles, &p, kNoIndex);
    if (!inserted) it->second.first = &p;
  }
  Json partitions = Json::array();
  for (const auto& [roles, row] : rows) {
    const auto& [part, index] = row;
    Json entry;
    entry["roles"] = std::vector<RoleId>(roles.members().begin(), roles.members().end());
    entry["cardinality"] = part ? part->cardinality : 0;
    entry["property_value"] =
        (index != kNoIndex && profile.evaluated()) ? Json(profile.values()[index]) : Json(nullptr);
    entry["entry_ids"] = part ? Json(part->entry_ids) : Json::array();
    partitions.push_back(std::move(entry));
  }
  Json doc;
  doc["n"] = profile.n();
  doc["L"] = profile.truncation_level();
  doc["s"] = profile.s();
  doc["property_kind"] =
      profile.evaluated() ? Json(PropertyKindName(*profile.property_kind())) : Json(nullptr);
  doc["corpus_size"] = profile.bound() ? Json(profile.corpus_size()) : Json(nullptr);
  doc["partitions"] = std::move(partitions);
  return doc;
}

SensitivePropertyProfile ProfileFromJson(const Json& doc) {
  const int n = As<int>(Field(doc, "n"), "n");
  const int level = As<int>(Field(doc, "L"), "L");
  const double s = As<double>(Field(doc, "s"), "s");
  const Json& kind_field = Field(doc, "property_kind");
  std::optional<PropertyKind> kind;
  if (!kind_field.is_null()) {
    kind = ParsePropertyKind(As<std::string>(kind_field, "property_kind"));
    if (!kind) FormatFailure("unknown property_kind");
  }
  const Json& rows = Field(doc, "partitions");
  if (!rows.is_array()) FormatFailure("'partitions' must be an array");

  std::vector<Partition> partitions;
  std::vector<std::vector<std::int64_t>> ids;
  std::map<RoleSet, double> values;
  bool any_ids = false;
  std::int64_t max_id = -1;
  for (const Json& row : rows) {
    std::vector<RoleId> members = As<std::vector<RoleId>>(Field(row, "roles"), "roles");
    if (!std::is_sorted(members.begin(), members.end())) FormatFailure("roles must be sorted");
    RoleSet roles;
    try {
      roles = RoleSet(std::move(members));
    } catch (const Error& e) {
      FormatFailure(std::string("bad role set: ") + e.what());
    }
    const auto card = As<std::int64_t>(Field(row, "cardinality"), "cardinality");
    const Json& value = Field(row, "property_value");
    auto entry_ids = As<std::vector<std::int64_t>>(Field(row, "entry_ids"), "entry_ids");
    if (card < 0) FormatFailure("negative cardinality for " + roles.ToString());
    if (!value.is_null()) values[roles] = As<double>(value, "property_value");
    if (!entry_ids.empty()) {
      if (static_cast<std::int64_t>(entry_ids.size()) != card) {
        FormatFailure("entry_ids length differs from cardinality for " + roles.ToString());
      }
      any_ids = true;
      for (std::int64_t id : entry_ids) max_id = std::max(max_id, id);
    }
    if (card > 0) {
      partitions.push_back({roles, card, {}});
      ids.push_back(std::move(entry_ids));
    }
  }
  try {
    // Partitions keep their input order here; the constructor sorts them, so
    // rebind by role set afterwards.
    std::map<RoleSet, std::vector<std::int64_t>> ids_by_set;
    for (std::size_t p = 0; p < partitions.size(); ++p) ids_by_set[partitions[p].roles] = ids[p];
    SensitivePropertyProfile profile(n, level, s, std::move(partitions));
    if (any_ids) {
      std::size_t corpus = static_cast<std::size_t>(max_id + 1);
      if (doc.contains("corpus_size") && !doc.at("corpus_size").is_null()) {
        corpus = As<std::size_t>(doc.at("corpus_size"), "corpus_size");
      }
      std::vector<std::vector<std::int64_t>> ordered;
      for (const Partition& p : profile.partitions()) ordered.push_back(ids_by_set[p.roles]);
      profile.SetBinding(std::move(ordered), corpus, false);
    }
    if (kind && !values.empty()) {
      const LatticeIndex& lattice = profile.lattice();
      std::vector<char> has_data(n, 0);
      for (const Partition& p : profile.partitions()) {
        for (RoleId r : p.roles.members()) has_data[r] = 1;
      }
      std::vector<double> lattice_values(lattice.size(), 0.0);
      std::vector<std::uint8_t> empty(lattice.size(), 0);
      for (std::size_t index = 0; index < lattice.size(); ++index) {
        const RoleSet set = lattice.SetAt(index);
        const auto it = values.find(set);
        if (it == values.end()) FormatFailure("missing property value for " + set.ToString());
        lattice_values[index] = it->second;
        const auto members = set.members();
        empty[index] = std::none_of(members.begin(), members.end(),
                                    [&](RoleId r) { return has_data[r] != 0; });
      }
      profile.SetEvaluation(*kind, std::move(lattice_values), std::move(empty));
    }
    return profile;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw;
    FormatFailure(std::string("invalid profile: ") + e.what());
  }
}

Json VulnToJson(const VulnerabilityMatrix& d) {
  Json rows = Json::array();
  for (int q = 0; q < d.m(); ++q) rows.push_back(std::vector<double>(d.row(q), d.row(q) + d.m()));
  Json doc;
  doc["m"] = d.m();
  doc["cluster_sizes"] = std::vector<int>(d.cluster_sizes().begin(), d.cluster_sizes().end());
  doc["d"] = std::move(rows);
  return doc;
}

VulnerabilityMatrix VulnFromJson(const Json& doc) {
  const int m = As<int>(Field(doc, "m"), "m");
  auto sizes = As<std::vector<int>>(Field(doc, "cluster_sizes"), "cluster_sizes");
  auto rows = As<std::vector<std::vector<double>>>(Field(doc, "d"), "d");
  if (static_cast<int>(rows.size()) != m) FormatFailure("'d' must have m rows");
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != m) FormatFailure("'d' must have m columns");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  try {
    VulnerabilityMatrix d(std::move(sizes), std::move(flat));
    if (d.m() != m) FormatFailure("cluster_sizes do not sum to m");
    return d;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw;
    FormatFailure(std::string("invalid vulnerability matrix: ") + e.what());
  }
}

Json AssignmentToJson(const AssignmentDocument& doc) {
  Json out;
  out["heuristic"] = doc.heuristic;
  out["seed"] = doc.seed;
  out["vm_of"] = doc.assignment.vm_of;
  out["total_risk"] = doc.total_risk;
  out["per_role_risk"] = doc.per_role_risk;
  return out;
}

AssignmentDocument AssignmentFromJson(const Json& doc) {
  AssignmentDocument out;
  out.heuristic = As<std::string>(Field(doc, "heuristic"), "heuristic");
  out.seed = As<std::uint64_t>(Field(doc, "seed"), "seed");
  out.assignment.vm_of = As<std::vector<int>>(Field(doc, "vm_of"), "vm_of");
  out.total_risk = As<double>(Field(doc, "total_risk"), "total_risk");
  out.per_role_risk = As<std::vector<double>>(Field(doc, "per_role_risk"), "per_role_risk");
  return out;
}

Json ReportToJson(const RiskReport& report) {
  Json deltas = Json::array();
  for (const auto& d : report.per_role_delta) deltas.push_back(d ? Json(*d) : Json(nullptr));
  Json out;
  out["total_risk"] = report.total_risk;
  out["per_role_risk"] = report.per_role_risk;
  out["pa"] = report.pa;
  out["per_role_pa"] = report.per_role_pa;
  out["delta"] = NumberOrNull(report.delta);
  out["delta_in_range"] = report.delta_in_range;
  out["per_role_delta"] = std::move(deltas);
  out["di"] = NumberOrNull(report.di);
  out["excluded_roles"] = report.excluded_roles;
  out["monotone"] = report.monotone;
  return out;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << doc.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failure on " + path);
}

}  // namespace rspap
