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

// RBAC policies, Zipfian workload generation over the role-set lattice, and
// the sensitive property profile (per role set: partition cardinality, bound
// data records and property value).

#ifndef RSPAP_RBAC_POLICY_H_
#define RSPAP_RBAC_POLICY_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rspap/info_measures.h"
#include "rspap/lattice.h"
#include "rspap/random.h"

namespace rspap {

enum class SensitivityClass { kHsd, kMsd, kLsd };

// s >= 2 -> HSD, 1.5 <= s < 2 -> MSD, 1 <= s < 1.5 -> LSD. Throws kParameter
// for s < 1.
SensitivityClass ClassifySensitivity(double s);
const char* SensitivityClassName(SensitivityClass c);  // "HSD" / "MSD" / "LSD"

// Bipartite role -> object permission graph.
class RbacPolicy {
 public:
  RbacPolicy(int n, std::int64_t object_count);

  // Throws kParameter on an out-of-range endpoint or a duplicate edge.
  void AddEdge(RoleId role, std::int64_t object);

  int n() const { return n_; }
  std::int64_t object_count() const { return object_count_; }
  std::size_t edge_count() const;
  // Roles holding a permission on `object`, ascending.
  const std::vector<RoleId>& RolesOf(std::int64_t object) const;

  // Exact-set partitions: objects grouped by the precise set of roles that
  // can access them. Objects no role can access are omitted.
  std::map<RoleSet, std::int64_t> PartitionCardinalities() const;

 private:
  int n_;
  std::int64_t object_count_;
  std::vector<std::vector<RoleId>> roles_of_;
};

struct Partition {
  RoleSet roles;
  std::int64_t cardinality = 0;
  std::vector<std::int64_t> entry_ids;  // sorted; filled by BindDataset
};

class SensitivePropertyProfile {
 public:
  // Partitions must have distinct role sets over [0, n) and positive
  // cardinality; they are stored in lexicographic order.
  SensitivePropertyProfile(int n, int truncation_level, double s,
                           std::vector<Partition> partitions);

  int n() const { return n_; }
  int truncation_level() const { return truncation_level_; }
  double s() const { return s_; }
  std::int64_t object_count() const { return object_count_; }
  std::span<const Partition> partitions() const { return partitions_; }
  const Partition* Find(const RoleSet& roles) const;
  // Role sets of size <= min(L, n), level-major.
  const LatticeIndex& lattice() const { return lattice_; }

  bool bound() const { return bound_; }
  // Set when the bound corpus ran out and records were reused.
  bool binding_warning() const { return binding_warning_; }
  std::size_t corpus_size() const { return corpus_size_; }
  void SetBinding(std::vector<std::vector<std::int64_t>> entry_ids, std::size_t corpus_size,
                  bool warning);

  bool evaluated() const { return kind_.has_value(); }
  std::optional<PropertyKind> property_kind() const { return kind_; }
  // Indexed like lattice(). An empty flag marks a role set whose dataset is
  // empty; its value is 0.
  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> empty_flags() const { return empty_; }
  void SetEvaluation(PropertyKind kind, std::vector<double> values,
                     std::vector<std::uint8_t> empty);

  // f(A). Throws kState before evaluation and kParameter for |A| > L.
  double Value(std::span<const RoleId> roles) const;
  bool IsEmpty(std::span<const RoleId> roles) const;

 private:
  int n_;
  int truncation_level_;
  double s_;
  std::int64_t object_count_ = 0;
  std::vector<Partition> partitions_;
  LatticeIndex lattice_;
  bool bound_ = false;
  bool binding_warning_ = false;
  std::size_t corpus_size_ = 0;
  std::optional<PropertyKind> kind_;
  std::vector<double> values_;
  std::vector<std::uint8_t> empty_;
};

// Two-step Zipfian workload: each object picks a lattice level with
// zipf(n, s), then a role set of that level with zipf(C(n, i), s) mapped
// through a seeded random injection from ranks to role sets. Levels with
// more than tail_cap role sets use the head/tail Zipf sampler.
SensitivePropertyProfile GenerateWorkload(int n, std::int64_t object_count, double s,
                                          int truncation_level, Rng& rng,
                                          double tail_cap = 1e9);

// Total cardinality per lattice level; element 0 is unused.
std::vector<std::int64_t> LevelTotals(const SensitivePropertyProfile& profile);

// Deals a seeded shuffle of [0, corpus_size) to the partitions in
// lexicographic order. When the corpus runs out, records are drawn with
// replacement and binding_warning() is set. Throws kInput for an empty
// corpus.
void BindDataset(SensitivePropertyProfile* profile, std::size_t corpus_size, Rng& rng);

// Union of the records of every partition that shares a role with `roles`,
// sorted. Throws kParameter on an unknown role.
std::vector<std::int64_t> RoleDataset(const SensitivePropertyProfile& profile,
                                      std::span<const RoleId> roles);

// Computes f for every role set of size <= L. Throws kState when unbound and
// kEvaluation naming the first role set whose property fails.
void EvaluateProfile(SensitivePropertyProfile* profile, const PropertyContext& ctx,
                     bool parallel = true);

}  // namespace rspap

#endif  // RSPAP_RBAC_POLICY_H_
