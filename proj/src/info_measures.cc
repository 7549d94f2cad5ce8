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

#include "rspap/info_measures.h"

#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rspap/error.h"

namespace rspap {
namespace {

constexpr double kMassTolerance = 1e-9;

void CheckPmf(std::span<const double> pmf, const char* what) {
  if (pmf.empty()) throw Error(ErrorCode::kDomain, std::string(what) + ": empty pmf");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kDomain, std::string(what) + ": negative or non-finite mass");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg << what << ": total mass " << total << " is not 1";
    throw Error(ErrorCode::kDomain, msg.str());
  }
}

// Mutual information of a 15x4 histogram; shared by the corpus-level and
// subset-level computations so that equal histograms give equal bits.
double CountsMutualInformation(std::span<const std::int64_t, kCells> counts) {
  std::int64_t total = 0;
  std::array<std::int64_t, kCategories> nx{};
  std::array<std::int64_t, kSlots> ny{};
  for (int c = 0; c < kCells; ++c) {
    total += counts[c];
    nx[c / kSlots] += counts[c];
    ny[c % kSlots] += counts[c];
  }
  const double n = static_cast<double>(total);
  double mi = 0.0;
  for (int c = 0; c < kCells; ++c) {
    if (counts[c] == 0) continue;
    const double pxy = static_cast<double>(counts[c]) / n;
    const double px = static_cast<double>(nx[c / kSlots]) / n;
    const double py = static_cast<double>(ny[c % kSlots]) / n;
    mi += pxy * std::log2(pxy / (px * py));
  }
  return mi;
}

}  // namespace

const char* PropertyKindName(PropertyKind kind) {
  return kind == PropertyKind::kKld ? "KLD" : "MI";
}

std::optional<PropertyKind> ParsePropertyKind(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "KLD") return PropertyKind::kKld;
  if (upper == "MI") return PropertyKind::kMi;
  return std::nullopt;
}

double Entropy(std::span<const double> pmf) {
  CheckPmf(pmf, "entropy");
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kDomain, "kl divergence: shape mismatch");
  CheckPmf(p, "kl divergence");
  CheckPmf(q, "kl divergence");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      std::ostringstream msg;
      msg << "kl divergence: p(" << i << ") > 0 where q(" << i << ") = 0";
      throw Error(ErrorCode::kSupport, msg.str());
    }
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

double MutualInformation(std::span<const double> joint, int rows, int cols) {
  if (rows < 1 || cols < 1 || joint.size() != static_cast<std::size_t>(rows) * cols) {
    throw Error(ErrorCode::kDomain, "mutual information: shape mismatch");
  }
  CheckPmf(joint, "mutual information");
  std::vector<double> px(rows, 0.0), py(cols, 0.0);
  for (int x = 0; x < rows; ++x) {
    for (int y = 0; y < cols; ++y) {
      px[x] += joint[x * cols + y];
      py[y] += joint[x * cols + y];
    }
  }
  double mi = 0.0;
  for (int x = 0; x < rows; ++x) {
    for (int y = 0; y < cols; ++y) {
      const double p = joint[x * cols + y];
      if (p > 0.0) mi += p * std::log2(p / (px[x] * py[y]));
    }
  }
  return mi;
}

double MutualInformation(const JointPmf& joint) {
  return MutualInformation(joint.probs, kCategories, kSlots);
}

PropertyContext::PropertyContext(std::span<const CheckinEntry> entries, PropertyKind kind)
    : kind_(kind) {
  if (entries.empty()) throw Error(ErrorCode::kDegenerate, "property context: empty corpus");
  cells_.reserve(entries.size());
  for (const CheckinEntry& e : entries) {
    cells_.push_back(static_cast<std::uint8_t>(e.cell()));
    ++global_counts_[e.cell()];
  }
  global_pmf_ = JointPmfFromCounts(global_counts_);
  global_mi_ = CountsMutualInformation(global_counts_);
}

double PropertyContext::ValueFromCounts(std::span<const std::int64_t, kCells> counts) const {
  const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (total <= 0) throw Error(ErrorCode::kDegenerate, "property of an empty dataset");
  if (kind_ == PropertyKind::kMi) return std::abs(CountsMutualInformation(counts) - global_mi_);
  const double n = static_cast<double>(total);
  double d = 0.0;
  for (int c = 0; c < kCells; ++c) {
    if (counts[c] == 0) continue;
    const double q = global_pmf_.probs[c];
    if (q == 0.0) throw Error(ErrorCode::kSupport, "dataset has mass outside the corpus support");
    const double p = static_cast<double>(counts[c]) / n;
    d += p * std::log2(p / q);
  }
  return d;
}

double PropertyContext::Value(std::span<const std::int64_t> dataset) const {
  std::array<std::int64_t, kCells> counts{};
  for (std::int64_t i : dataset) {
    if (i < 0 || static_cast<std::size_t>(i) >= cells_.size()) {
      throw Error(ErrorCode::kParameter, "dataset index out of range");
    }
    ++counts[cells_[i]];
  }
  return ValueFromCounts(counts);
}

std::vector<double> MonotonicityCurve(const PropertyContext& ctx,
                                      std::span<const double> fractions, int trials, Rng& rng) {
  if (trials < 1) throw Error(ErrorCode::kParameter, "monotonicity: trials must be >= 1");
  const std::size_t n = ctx.size();
  double previous = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kParameter, "monotonicity: fractions must lie in (0, 1]");
    }
    if (f < previous) throw Error(ErrorCode::kParameter, "monotonicity: fractions must ascend");
    if (f * static_cast<double>(n) < 1.0) {
      std::ostringstream msg;
      msg << "monotonicity: fraction " << f << " of " << n << " entries is below one entry";
      throw Error(ErrorCode::kParameter, msg.str());
    }
    previous = f;
  }
  std::vector<std::int64_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::int64_t{0});
  std::vector<double> means;
  means.reserve(fractions.size());
  for (double f : fractions) {
    const auto k = static_cast<std::size_t>(std::floor(f * static_cast<double>(n)));
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      // Partial Fisher-Yates: the first k slots become a uniform k-subset.
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.UniformIndex(n - i);
        std::swap(pool[i], pool[j]);
      }
      sum += ctx.Value(std::span<const std::int64_t>(pool.data(), k));
    }
    means.push_back(sum / trials);
  }
  return means;
}

}  // namespace rspap
