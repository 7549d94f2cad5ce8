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

#include "rspap/vulnerability.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "rspap/error.h"

namespace rspap {

VulnerabilityMatrix::VulnerabilityMatrix(std::vector<int> cluster_sizes, std::vector<double> d)
    : cluster_sizes_(std::move(cluster_sizes)), d_(std::move(d)) {
  if (cluster_sizes_.empty()) throw Error(ErrorCode::kParameter, "no VM clusters");
  for (std::size_t c = 0; c < cluster_sizes_.size(); ++c) {
    if (cluster_sizes_[c] < 1) throw Error(ErrorCode::kParameter, "empty VM cluster");
    cluster_of_.insert(cluster_of_.end(), cluster_sizes_[c], static_cast<int>(c));
  }
  m_ = static_cast<int>(cluster_of_.size());
  if (d_.size() != static_cast<std::size_t>(m_) * m_) {
    std::ostringstream msg;
    msg << "vulnerability matrix has " << d_.size() << " entries, expected " << m_ << "x" << m_;
    throw Error(ErrorCode::kParameter, msg.str());
  }
}

VulnerabilityMatrix GenerateVulnMatrix(std::span<const int> cluster_sizes,
                                       const VulnRanges& ranges, Rng& rng,
                                       const ClusterCaps& caps) {
  if (cluster_sizes.empty() || static_cast<int>(cluster_sizes.size()) > caps.max_clusters) {
    std::ostringstream msg;
    msg << "need 1.." << caps.max_clusters << " clusters, got " << cluster_sizes.size();
    throw Error(ErrorCode::kParameter, msg.str());
  }
  for (int size : cluster_sizes) {
    if (size < 1 || size > caps.max_cluster_size) {
      std::ostringstream msg;
      msg << "cluster size " << size << " outside 1.." << caps.max_cluster_size;
      throw Error(ErrorCode::kParameter, msg.str());
    }
  }
  const VulnRanges& r = ranges;
  if (!(r.intra_lo > 0.0 && r.intra_lo <= r.intra_hi && r.intra_hi <= 1.0)) {
    throw Error(ErrorCode::kParameter, "intra-VM range must satisfy 0 < lo <= hi <= 1");
  }
  if (!(r.cross_lo > 0.0 && r.cross_lo <= r.cross_hi && r.cross_hi < 1.0)) {
    throw Error(ErrorCode::kParameter, "cross-VM range must satisfy 0 < lo <= hi < 1");
  }
  if (!(r.cross_hi < r.intra_lo)) {
    throw Error(ErrorCode::kParameter,
                "cross-VM leakage must stay below intra-VM leakage (cross_hi < intra_lo)");
  }
  std::vector<int> sizes(cluster_sizes.begin(), cluster_sizes.end());
  const int m = std::accumulate(sizes.begin(), sizes.end(), 0);
  std::vector<int> cluster_of;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    cluster_of.insert(cluster_of.end(), sizes[c], static_cast<int>(c));
  }
  std::vector<double> d(static_cast<std::size_t>(m) * m, 0.0);
  for (int q = 0; q < m; ++q) d[q * m + q] = rng.Uniform(r.intra_lo, r.intra_hi);
  for (int q = 0; q < m; ++q) {
    for (int l = q + 1; l < m; ++l) {
      if (cluster_of[q] != cluster_of[l]) continue;
      const double v = rng.Uniform(r.cross_lo, r.cross_hi);
      d[q * m + l] = v;
      d[l * m + q] = v;
    }
  }
  return VulnerabilityMatrix(std::move(sizes), std::move(d));
}

std::optional<VulnViolation> Validate(const VulnerabilityMatrix& d) {
  const int m = d.m();
  auto violation = [](const char* kind, int q, int l, const std::string& what) {
    std::ostringstream msg;
    msg << what << " at (" << q << ", " << l << ")";
    return VulnViolation{kind, q, l, msg.str()};
  };
  for (int q = 0; q < m; ++q) {
    for (int l = 0; l < m; ++l) {
      const double v = d(q, l);
      if (!(v >= 0.0 && v <= 1.0)) return violation("range", q, l, "entry outside [0, 1]");
      if (v != d(l, q)) return violation("symmetry", q, l, "matrix is not symmetric");
      if (q == l) {
        if (!(v > 0.0)) return violation("diagonal", q, l, "diagonal entry is not positive");
        continue;
      }
      if (d.cluster_of(q) != d.cluster_of(l)) {
        if (v != 0.0) return violation("isolation", q, l, "non-zero entry across clusters");
      } else if (!(v < std::min(d(q, q), d(l, l)))) {
        return violation("ordering", q, l, "cross-VM entry not below both diagonals");
      }
    }
  }
  return std::nullopt;
}

std::vector<int> EvenClusterLayout(int m, int max_clusters) {
  if (m < 1 || max_clusters < 1) throw Error(ErrorCode::kParameter, "need m >= 1");
  const int clusters = std::min(m, max_clusters);
  std::vector<int> sizes(clusters, m / clusters);
  for (int c = 0; c < m % clusters; ++c) ++sizes[c];
  return sizes;
}

}  // namespace rspap
