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

// VM vulnerability matrix D: d[q][l] is the probability that data leaks
// between VMs q and l (q == l: between roles colocated on one VM). VMs are
// grouped into physically isolated clusters.

#ifndef RSPAP_VULNERABILITY_H_
#define RSPAP_VULNERABILITY_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rspap/random.h"

namespace rspap {

class VulnerabilityMatrix {
 public:
  VulnerabilityMatrix() = default;
  // d is row-major m x m with m = sum(cluster_sizes). Only the shape is
  // checked here; see Validate for the model invariants.
  VulnerabilityMatrix(std::vector<int> cluster_sizes, std::vector<double> d);

  int m() const { return m_; }
  std::span<const int> cluster_sizes() const { return cluster_sizes_; }
  int cluster_of(int q) const { return cluster_of_[q]; }
  double operator()(int q, int l) const { return d_[static_cast<std::size_t>(q) * m_ + l]; }
  const double* row(int q) const { return d_.data() + static_cast<std::size_t>(q) * m_; }
  std::span<const double> data() const { return d_; }

  friend bool operator==(const VulnerabilityMatrix&, const VulnerabilityMatrix&) = default;

 private:
  int m_ = 0;
  std::vector<int> cluster_sizes_;
  std::vector<int> cluster_of_;
  std::vector<double> d_;
};

struct VulnRanges {
  double intra_lo = 0.5;  // diagonal
  double intra_hi = 1.0;
  double cross_lo = 0.05;  // same-cluster off-diagonal
  double cross_hi = 0.45;
};

struct ClusterCaps {
  int max_clusters = 6;
  int max_cluster_size = 32;
};

// Diagonal ~ U(intra), same-cluster pairs ~ U(cross) mirrored, other pairs
// 0. Throws kParameter for bad sizes or ranges, including cross_hi >=
// intra_lo.
VulnerabilityMatrix GenerateVulnMatrix(std::span<const int> cluster_sizes,
                                       const VulnRanges& ranges, Rng& rng,
                                       const ClusterCaps& caps = {});

struct VulnViolation {
  std::string kind;  // "symmetry", "range", "diagonal", "isolation", "ordering"
  int q = 0;
  int l = 0;
  std::string message;
};

// First violated invariant in row-major scan order, if any.
std::optional<VulnViolation> Validate(const VulnerabilityMatrix& d);

// min(m, max_clusters) clusters of near-equal size, larger ones first.
std::vector<int> EvenClusterLayout(int m, int max_clusters = 6);

}  // namespace rspap

#endif  // RSPAP_VULNERABILITY_H_
