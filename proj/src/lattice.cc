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

#include "rspap/lattice.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rspap/error.h"

namespace rspap {

RoleSet::RoleSet(std::vector<RoleId> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error(ErrorCode::kParameter, "role set must be non-empty");
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw Error(ErrorCode::kParameter, "role set has duplicate members");
  }
  if (members_.front() < 0) throw Error(ErrorCode::kParameter, "negative role index");
}

bool RoleSet::Contains(RoleId r) const {
  return std::binary_search(members_.begin(), members_.end(), r);
}

bool RoleSet::Intersects(const RoleSet& other) const {
  auto a = members_.begin();
  auto b = other.members_.begin();
  while (a != members_.end() && b != other.members_.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

std::string RoleSet::ToString() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out << ',';
    out << members_[i];
  }
  out << '}';
  return out.str();
}

std::optional<std::uint64_t> BinomialExact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    // c == C(n, i) here; C(n, i) * (n - i) is divisible by (i + 1).
    c = c * (n - i) / (i + 1);
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

double BinomialApprox(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  if (auto exact = BinomialExact(n, k)) return static_cast<double>(*exact);
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  return std::exp(std::lgamma(dn + 1) - std::lgamma(dk + 1) - std::lgamma(dn - dk + 1));
}

LatticeIndex::LatticeIndex(int n, int max_level, std::size_t max_sets)
    : n_(n), max_level_(std::min(max_level, n)) {
  if (n < 1) throw Error(ErrorCode::kParameter, "lattice needs n >= 1");
  if (max_level < 1) throw Error(ErrorCode::kParameter, "truncation level must be >= 1");
  const int cols = max_level_ + 1;
  binom_.assign(static_cast<std::size_t>(n_ + 1) * cols, 0);
  for (int a = 0; a <= n_; ++a) {
    binom_[a * cols] = 1;
    for (int b = 1; b <= std::min(a, max_level_); ++b) {
      const std::uint64_t left = binom_[(a - 1) * cols + b - 1];
      const std::uint64_t up = (b <= a - 1) ? binom_[(a - 1) * cols + b] : 0;
      if (left > std::numeric_limits<std::uint64_t>::max() - up) {
        throw Error(ErrorCode::kCapacity, "lattice level too large");
      }
      binom_[a * cols + b] = left + up;
    }
  }
  offsets_.assign(max_level_ + 1, 0);
  for (int k = 1; k <= max_level_; ++k) {
    const std::uint64_t level = Choose(n_, k);
    if (level > max_sets || offsets_[k - 1] + level > max_sets) {
      std::ostringstream msg;
      msg << "truncated lattice for n=" << n << ", L=" << max_level
          << " exceeds " << max_sets << " role sets";
      throw Error(ErrorCode::kCapacity, msg.str());
    }
    offsets_[k] = offsets_[k - 1] + level;
  }
}

int LatticeIndex::LevelOf(std::size_t index) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<int>(it - offsets_.begin());
}

std::size_t LatticeIndex::Rank(std::span<const RoleId> members) const {
  const int k = static_cast<int>(members.size());
  std::uint64_t rank = 0;
  int prev = -1;
  for (int t = 0; t < k; ++t) {
    // Combinations whose t-th member lies in (prev, c_t), by the hockey-stick
    // identity.
    rank += Choose(n_ - prev - 1, k - t) - Choose(n_ - members[t], k - t);
    prev = members[t];
  }
  return LevelOffset(k) + rank;
}

void LatticeIndex::Unrank(std::size_t index, std::vector<RoleId>* members) const {
  const int k = LevelOf(index);
  std::uint64_t rank = index - LevelOffset(k);
  members->resize(k);
  int v = 0;
  for (int t = 0; t < k; ++t) {
    for (;; ++v) {
      const std::uint64_t count = Choose(n_ - v - 1, k - t - 1);
      if (rank < count) break;
      rank -= count;
    }
    (*members)[t] = v++;
  }
}

RoleSet LatticeIndex::SetAt(std::size_t index) const {
  std::vector<RoleId> members;
  Unrank(index, &members);
  return RoleSet(std::move(members));
}

std::uint64_t CombinationRank(int n, std::span<const RoleId> members) {
  const int k = static_cast<int>(members.size());
  std::uint64_t rank = 0;
  int prev = -1;
  for (int t = 0; t < k; ++t) {
    rank += *BinomialExact(n - prev - 1, k - t) - *BinomialExact(n - members[t], k - t);
    prev = members[t];
  }
  return rank;
}

void CombinationUnrank(int n, int k, std::uint64_t rank, std::vector<RoleId>* members) {
  members->resize(k);
  int v = 0;
  for (int t = 0; t < k; ++t) {
    for (;; ++v) {
      const std::uint64_t count = *BinomialExact(n - v - 1, k - t - 1);
      if (rank < count) break;
      rank -= count;
    }
    (*members)[t] = v++;
  }
}

bool NextCombination(int n, std::vector<RoleId>* members) {
  auto& c = *members;
  const int k = static_cast<int>(c.size());
  int t = k - 1;
  while (t >= 0 && c[t] == n - k + t) --t;
  if (t < 0) return false;
  ++c[t];
  for (int u = t + 1; u < k; ++u) c[u] = c[u - 1] + 1;
  return true;
}

namespace {

void VisitFrom(int n, int max_level, std::vector<RoleId>* prefix,
               const std::function<void(std::span<const RoleId>)>& visit) {
  const int start = prefix->empty() ? 0 : prefix->back() + 1;
  for (int r = start; r < n; ++r) {
    prefix->push_back(r);
    visit(*prefix);
    if (static_cast<int>(prefix->size()) < max_level) VisitFrom(n, max_level, prefix, visit);
    prefix->pop_back();
  }
}

}  // namespace

void ForEachRoleSetLexicographic(int n, int max_level,
                                 const std::function<void(std::span<const RoleId>)>& visit) {
  std::vector<RoleId> prefix;
  VisitFrom(n, max_level, &prefix, visit);
}

}  // namespace rspap
