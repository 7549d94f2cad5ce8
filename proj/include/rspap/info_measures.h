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

// Entropy, divergence and mutual information in bits, and the two
// sensitive-property functions evaluated on subsets of a check-in corpus.

#ifndef RSPAP_INFO_MEASURES_H_
#define RSPAP_INFO_MEASURES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rspap/checkin.h"
#include "rspap/random.h"

namespace rspap {

enum class PropertyKind { kKld, kMi };

const char* PropertyKindName(PropertyKind kind);  // "KLD" / "MI"
// Case-insensitive.
std::optional<PropertyKind> ParsePropertyKind(std::string_view name);

// All measures throw kDomain when an argument is not a pmf (negative entry,
// or total mass off 1 by more than 1e-9). 0 log 0 is taken as 0.
double Entropy(std::span<const double> pmf);
// Throws kSupport when p(x) > 0 where q(x) == 0.
double KlDivergence(std::span<const double> p, std::span<const double> q);
// Mutual information of a rows x cols joint pmf stored row-major.
double MutualInformation(std::span<const double> joint, int rows, int cols);
double MutualInformation(const JointPmf& joint);

// f(A) for datasets drawn from one corpus: D(P_A || P_G) for kKld,
// |MI(P_A) - MI(P_G)| for kMi. Immutable after construction.
class PropertyContext {
 public:
  // Throws kDegenerate on an empty corpus.
  PropertyContext(std::span<const CheckinEntry> entries, PropertyKind kind);

  PropertyKind kind() const { return kind_; }
  std::size_t size() const { return cells_.size(); }
  // Cell code of every corpus entry.
  std::span<const std::uint8_t> cells() const { return cells_; }
  const JointPmf& global_pmf() const { return global_pmf_; }
  double global_mi() const { return global_mi_; }

  // Property of the dataset with the given cell histogram. Throws
  // kDegenerate on an empty histogram.
  double ValueFromCounts(std::span<const std::int64_t, kCells> counts) const;
  // Property of a dataset given as corpus indices (duplicates count twice).
  double Value(std::span<const std::int64_t> dataset) const;

 private:
  PropertyKind kind_;
  std::vector<std::uint8_t> cells_;
  std::array<std::int64_t, kCells> global_counts_{};
  JointPmf global_pmf_;
  double global_mi_ = 0.0;
};

// Mean property value over `trials` uniformly random subsets of each
// fraction of the corpus. Fractions must be ascending in (0, 1].
std::vector<double> MonotonicityCurve(const PropertyContext& ctx,
                                      std::span<const double> fractions, int trials, Rng& rng);

}  // namespace rspap

#endif  // RSPAP_INFO_MEASURES_H_
