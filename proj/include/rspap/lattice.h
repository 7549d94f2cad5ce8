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

// Role sets and the truncated role-set lattice (all non-empty subsets of
// {0..n-1} with at most L members).

#ifndef RSPAP_LATTICE_H_
#define RSPAP_LATTICE_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rspap {

using RoleId = std::int32_t;

// Non-empty, strictly ascending set of role indices. Ordering is
// lexicographic over the member sequence, so {0} < {0,1} < {0,1,2} < {0,2}.
class RoleSet {
 public:
  RoleSet() = default;
  // Sorts and validates; throws kParameter on empty or duplicate members.
  explicit RoleSet(std::vector<RoleId> members);
  RoleSet(std::initializer_list<RoleId> members)
      : RoleSet(std::vector<RoleId>(members)) {}

  std::span<const RoleId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool Contains(RoleId r) const;
  bool Intersects(const RoleSet& other) const;

  std::string ToString() const;

  friend auto operator<=>(const RoleSet&, const RoleSet&) = default;
  friend bool operator==(const RoleSet&, const RoleSet&) = default;

 private:
  std::vector<RoleId> members_;
};

// C(n, k) when it fits in 64 bits.
std::optional<std::uint64_t> BinomialExact(std::uint64_t n, std::uint64_t k);
// C(n, k) as a double; never overflows to inf for n below ~1000.
double BinomialApprox(std::uint64_t n, std::uint64_t k);

// Dense index over the truncated lattice: level-major (all singletons,
// then all pairs, ...), lexicographic within a level.
class LatticeIndex {
 public:
  // Throws kCapacity when the lattice has more than max_sets entries.
  LatticeIndex(int n, int max_level, std::size_t max_sets = std::size_t{1} << 31);

  int n() const { return n_; }
  int max_level() const { return max_level_; }
  std::size_t size() const { return offsets_.back(); }
  std::size_t LevelOffset(int k) const { return offsets_[k - 1]; }
  std::size_t LevelSize(int k) const { return offsets_[k] - offsets_[k - 1]; }
  int LevelOf(std::size_t index) const;

  // members must be strictly ascending, valid, and 1 <= size <= max_level.
  std::size_t Rank(std::span<const RoleId> members) const;
  void Unrank(std::size_t index, std::vector<RoleId>* members) const;
  RoleSet SetAt(std::size_t index) const;

  // Binomial lookup for a <= n, b <= max_level.
  std::uint64_t Choose(int a, int b) const {
    return (b < 0 || a < b) ? 0 : binom_[a * (max_level_ + 1) + b];
  }

 private:
  int n_;
  int max_level_;
  std::vector<std::uint64_t> binom_;
  std::vector<std::size_t> offsets_;
};

// Lexicographic rank of a k-combination of {0..n-1} among all
// k-combinations (k = members.size()). Requires C(n, k) < 2^64.
std::uint64_t CombinationRank(int n, std::span<const RoleId> members);
void CombinationUnrank(int n, int k, std::uint64_t rank, std::vector<RoleId>* members);

// Advances an ascending k-combination of {0..n-1} to its lexicographic
// successor. Returns false after the last one.
bool NextCombination(int n, std::vector<RoleId>* members);

// Visits every role set with 1..max_level members in full lexicographic
// order ({0}, {0,1}, {0,1,2}, ..., {1}, ...).
void ForEachRoleSetLexicographic(int n, int max_level,
                                 const std::function<void(std::span<const RoleId>)>& visit);

}  // namespace rspap

#endif  // RSPAP_LATTICE_H_
