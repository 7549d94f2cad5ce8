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

#include "rspap/rbac_policy.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rspap/error.h"
#include "rspap/kernels.h"
#include "rspap/zipf.h"

namespace rspap {
namespace {

constexpr std::uint64_t kLazyPermutationLimit = std::uint64_t{1} << 62;

struct VectorHash {
  std::size_t operator()(const std::vector<RoleId>& v) const {
    std::uint64_t h = 0;
    for (RoleId r : v) h = SplitMix64(h ^ static_cast<std::uint64_t>(r));
    return static_cast<std::size_t>(h);
  }
};

// Seeded random injection from Zipf ranks of one lattice level onto the
// level's role sets, built lazily in order of first request. Small levels
// run a lazy Fisher-Yates over lexicographic ranks; levels too large to rank
// exactly draw uniform subsets with Floyd's algorithm and reject repeats.
class LevelMapper {
 public:
  LevelMapper(int n, int k) : n_(n), k_(k) {
    const auto exact = BinomialExact(n, k);
    if (exact && *exact <= kLazyPermutationLimit) size_ = *exact;
  }

  // Returns a dense id for the role set assigned to `rank`.
  std::uint32_t Map(double rank, Rng& rng) {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(rank);
    const auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    std::vector<RoleId> members = size_ ? NextPermuted(rng) : NextFloyd(rng);
    const auto id = static_cast<std::uint32_t>(sets_.size());
    sets_.push_back(std::move(members));
    ids_.emplace(key, id);
    return id;
  }

  const std::vector<std::vector<RoleId>>& sets() const { return sets_; }

 private:
  std::vector<RoleId> NextPermuted(Rng& rng) {
    const std::uint64_t j = next_ + rng.UniformIndex(size_ - next_);
    const auto at = [this](std::uint64_t i) {
      const auto found = swaps_.find(i);
      return found == swaps_.end() ? i : found->second;
    };
    const std::uint64_t value = at(j);
    swaps_[j] = at(next_);
    ++next_;
    std::vector<RoleId> members;
    CombinationUnrank(n_, k_, value, &members);
    return members;
  }

  std::vector<RoleId> NextFloyd(Rng& rng) {
    for (;;) {
      std::vector<RoleId> members;
      members.reserve(k_);
      for (int j = n_ - k_; j < n_; ++j) {
        const auto t = static_cast<RoleId>(rng.UniformIndex(static_cast<std::uint64_t>(j) + 1));
        if (std::find(members.begin(), members.end(), t) == members.end()) {
          members.push_back(t);
        } else {
          members.push_back(j);
        }
      }
      std::sort(members.begin(), members.end());
      if (used_.insert(members).second) return members;
    }
  }

  int n_;
  int k_;
  std::uint64_t size_ = 0;
  std::uint64_t next_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> swaps_;
  std::unordered_set<std::vector<RoleId>, VectorHash> used_;
  std::unordered_map<std::uint64_t, std::uint32_t> ids_;
  std::vector<std::vector<RoleId>> sets_;
};

}  // namespace

SensitivityClass ClassifySensitivity(double s) {
  if (!(s >= 1.0)) {
    std::ostringstream msg;
    msg << "sensitivity class needs s >= 1, got " << s;
    throw Error(ErrorCode::kParameter, msg.str());
  }
  if (s >= 2.0) return SensitivityClass::kHsd;
  if (s >= 1.5) return SensitivityClass::kMsd;
  return SensitivityClass::kLsd;
}

const char* SensitivityClassName(SensitivityClass c) {
  switch (c) {
    case SensitivityClass::kHsd: return "HSD";
    case SensitivityClass::kMsd: return "MSD";
    case SensitivityClass::kLsd: return "LSD";
  }
  return "?";
}

RbacPolicy::RbacPolicy(int n, std::int64_t object_count)
    : n_(n), object_count_(object_count) {
  if (n < 1) throw Error(ErrorCode::kParameter, "policy needs n >= 1");
  if (object_count < 0) throw Error(ErrorCode::kParameter, "negative object count");
  roles_of_.resize(static_cast<std::size_t>(object_count));
}

void RbacPolicy::AddEdge(RoleId role, std::int64_t object) {
  if (role < 0 || role >= n_ || object < 0 || object >= object_count_) {
    std::ostringstream msg;
    msg << "edge (" << role << ", " << object << ") out of range";
    throw Error(ErrorCode::kParameter, msg.str());
  }
  auto& roles = roles_of_[object];
  const auto pos = std::lower_bound(roles.begin(), roles.end(), role);
  if (pos != roles.end() && *pos == role) {
    std::ostringstream msg;
    msg << "duplicate edge (" << role << ", " << object << ")";
    throw Error(ErrorCode::kParameter, msg.str());
  }
  roles.insert(pos, role);
}

std::size_t RbacPolicy::edge_count() const {
  std::size_t total = 0;
  for (const auto& roles : roles_of_) total += roles.size();
  return total;
}

const std::vector<RoleId>& RbacPolicy::RolesOf(std::int64_t object) const {
  if (object < 0 || object >= object_count_) {
    throw Error(ErrorCode::kParameter, "object index out of range");
  }
  return roles_of_[object];
}

std::map<RoleSet, std::int64_t> RbacPolicy::PartitionCardinalities() const {
  std::map<RoleSet, std::int64_t> out;
  for (const auto& roles : roles_of_) {
    if (!roles.empty()) ++out[RoleSet(roles)];
  }
  return out;
}

SensitivePropertyProfile::SensitivePropertyProfile(int n, int truncation_level, double s,
                                                   std::vector<Partition> partitions)
    : n_(n),
      truncation_level_(truncation_level),
      s_(s),
      partitions_(std::move(partitions)),
      lattice_(n, truncation_level) {
  std::sort(partitions_.begin(), partitions_.end(),
            [](const Partition& a, const Partition& b) { return a.roles < b.roles; });
  for (std::size_t p = 0; p < partitions_.size(); ++p) {
    const Partition& part = partitions_[p];
    if (part.roles.empty() || part.roles.members().back() >= n) {
      throw Error(ErrorCode::kParameter, "partition role set outside [0, n)");
    }
    if (part.cardinality <= 0) {
      throw Error(ErrorCode::kParameter, "partition " + part.roles.ToString() +
                                             " has non-positive cardinality");
    }
    if (p > 0 && partitions_[p - 1].roles == part.roles) {
      throw Error(ErrorCode::kParameter, "duplicate partition " + part.roles.ToString());
    }
    object_count_ += part.cardinality;
  }
}

const Partition* SensitivePropertyProfile::Find(const RoleSet& roles) const {
  const auto it = std::lower_bound(
      partitions_.begin(), partitions_.end(), roles,
      [](const Partition& p, const RoleSet& r) { return p.roles < r; });
  return (it != partitions_.end() && it->roles == roles) ? &*it : nullptr;
}

void SensitivePropertyProfile::SetBinding(std::vector<std::vector<std::int64_t>> entry_ids,
                                          std::size_t corpus_size, bool warning) {
  if (entry_ids.size() != partitions_.size()) {
    throw Error(ErrorCode::kParameter, "binding does not match the partition count");
  }
  for (std::size_t p = 0; p < partitions_.size(); ++p) {
    if (static_cast<std::int64_t>(entry_ids[p].size()) != partitions_[p].cardinality) {
      throw Error(ErrorCode::kParameter,
                  "partition " + partitions_[p].roles.ToString() + " binding size mismatch");
    }
    for (std::int64_t id : entry_ids[p]) {
      if (id < 0 || static_cast<std::size_t>(id) >= corpus_size) {
        throw Error(ErrorCode::kParameter, "bound record index outside the corpus");
      }
    }
    std::sort(entry_ids[p].begin(), entry_ids[p].end());
    partitions_[p].entry_ids = std::move(entry_ids[p]);
  }
  corpus_size_ = corpus_size;
  binding_warning_ = warning;
  bound_ = true;
}

void SensitivePropertyProfile::SetEvaluation(PropertyKind kind, std::vector<double> values,
                                             std::vector<std::uint8_t> empty) {
  if (values.size() != lattice_.size() || empty.size() != lattice_.size()) {
    throw Error(ErrorCode::kParameter, "evaluation does not match the lattice size");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::kParameter, "property value of " + lattice_.SetAt(i).ToString() +
                                             " is negative or not finite");
    }
    if (empty[i] && values[i] != 0.0) {
      throw Error(ErrorCode::kParameter, "empty role set " + lattice_.SetAt(i).ToString() +
                                             " carries a non-zero value");
    }
  }
  kind_ = kind;
  values_ = std::move(values);
  empty_ = std::move(empty);
}

double SensitivePropertyProfile::Value(std::span<const RoleId> roles) const {
  if (!evaluated()) throw Error(ErrorCode::kState, "profile has not been evaluated");
  if (roles.empty() || static_cast<int>(roles.size()) > lattice_.max_level()) {
    throw Error(ErrorCode::kParameter, "role set size outside the evaluated lattice");
  }
  return values_[lattice_.Rank(roles)];
}

bool SensitivePropertyProfile::IsEmpty(std::span<const RoleId> roles) const {
  if (!evaluated()) throw Error(ErrorCode::kState, "profile has not been evaluated");
  if (roles.empty() || static_cast<int>(roles.size()) > lattice_.max_level()) {
    throw Error(ErrorCode::kParameter, "role set size outside the evaluated lattice");
  }
  return empty_[lattice_.Rank(roles)] != 0;
}

SensitivePropertyProfile GenerateWorkload(int n, std::int64_t object_count, double s,
                                          int truncation_level, Rng& rng, double tail_cap) {
  if (n < 1) throw Error(ErrorCode::kParameter, "workload needs n >= 1");
  if (object_count < 1) throw Error(ErrorCode::kParameter, "workload needs object_count >= 1");
  if (truncation_level < 1) throw Error(ErrorCode::kParameter, "truncation level must be >= 1");
  const ZipfSampler level_sampler(n, s, tail_cap);
  std::vector<std::int64_t> bucket(n + 1, 0);
  for (std::int64_t o = 0; o < object_count; ++o) {
    ++bucket[static_cast<int>(level_sampler.Sample(rng))];
  }
  std::vector<Partition> partitions;
  for (int level = 1; level <= n; ++level) {
    if (bucket[level] == 0) continue;
    const ZipfSampler sampler(BinomialApprox(n, level), s, tail_cap);
    LevelMapper mapper(n, level);
    std::vector<std::int64_t> counts;
    for (std::int64_t j = 0; j < bucket[level]; ++j) {
      const std::uint32_t id = mapper.Map(sampler.Sample(rng), rng);
      if (id >= counts.size()) counts.resize(id + 1, 0);
      ++counts[id];
    }
    for (std::size_t id = 0; id < counts.size(); ++id) {
      partitions.push_back({RoleSet(mapper.sets()[id]), counts[id], {}});
    }
  }
  return SensitivePropertyProfile(n, truncation_level, s, std::move(partitions));
}

std::vector<std::int64_t> LevelTotals(const SensitivePropertyProfile& profile) {
  std::vector<std::int64_t> totals(profile.n() + 1, 0);
  for (const Partition& p : profile.partitions()) totals[p.roles.size()] += p.cardinality;
  return totals;
}

void BindDataset(SensitivePropertyProfile* profile, std::size_t corpus_size, Rng& rng) {
  if (corpus_size == 0) throw Error(ErrorCode::kInput, "cannot bind an empty dataset");
  std::vector<std::int64_t> order(corpus_size);
  std::iota(order.begin(), order.end(), std::int64_t{0});
  rng.Shuffle(std::span<std::int64_t>(order));
  std::size_t cursor = 0;
  bool warning = false;
  std::vector<std::vector<std::int64_t>> ids;
  ids.reserve(profile->partitions().size());
  for (const Partition& p : profile->partitions()) {
    std::vector<std::int64_t> mine;
    mine.reserve(static_cast<std::size_t>(p.cardinality));
    for (std::int64_t c = 0; c < p.cardinality; ++c) {
      if (cursor < corpus_size) {
        mine.push_back(order[cursor++]);
      } else {
        warning = true;
        mine.push_back(static_cast<std::int64_t>(rng.UniformIndex(corpus_size)));
      }
    }
    ids.push_back(std::move(mine));
  }
  profile->SetBinding(std::move(ids), corpus_size, warning);
}

std::vector<std::int64_t> RoleDataset(const SensitivePropertyProfile& profile,
                                      std::span<const RoleId> roles) {
  for (RoleId r : roles) {
    if (r < 0 || r >= profile.n()) {
      std::ostringstream msg;
      msg << "role " << r << " outside [0, " << profile.n() << ")";
      throw Error(ErrorCode::kParameter, msg.str());
    }
  }
  std::vector<std::int64_t> out;
  for (const Partition& p : profile.partitions()) {
    const auto members = p.roles.members();
    const bool shares = std::any_of(roles.begin(), roles.end(), [&](RoleId r) {
      return std::binary_search(members.begin(), members.end(), r);
    });
    if (shares) out.insert(out.end(), p.entry_ids.begin(), p.entry_ids.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void EvaluateProfile(SensitivePropertyProfile* profile, const PropertyContext& ctx,
                     bool parallel) {
  if (!profile->bound()) throw Error(ErrorCode::kState, "profile has no bound dataset");
  if (profile->corpus_size() != ctx.size()) {
    throw Error(ErrorCode::kParameter, "property context and binding use different corpora");
  }
  LatticeValues result = parallel ? EvaluateLatticeParallel(*profile, ctx)
                                  : EvaluateLatticeSerial(*profile, ctx);
  profile->SetEvaluation(ctx.kind(), std::move(result.values), std::move(result.empty));
}

}  // namespace rspap
