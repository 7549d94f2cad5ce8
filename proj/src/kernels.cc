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

#include "rspap/kernels.h"

#include <omp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <limits>

#include "rspap/error.h"

namespace rspap {
namespace {

constexpr std::size_t kNoFailure = std::numeric_limits<std::size_t>::max();

// Records renumbered cell-major; each cell's range starts on a word boundary
// so that its histogram entry is a popcount over whole words.
struct CellLayout {
  std::array<std::size_t, kCells + 1> word_offset{};
  std::vector<std::size_t> bit_of;  // corpus index -> bit position
  std::size_t words = 0;
};

CellLayout MakeCellLayout(std::span<const std::uint8_t> cells) {
  CellLayout layout;
  std::array<std::size_t, kCells> count{};
  for (std::uint8_t c : cells) ++count[c];
  for (int c = 0; c < kCells; ++c) {
    layout.word_offset[c + 1] = layout.word_offset[c] + (count[c] + 63) / 64;
  }
  layout.words = layout.word_offset[kCells];
  std::array<std::size_t, kCells> next{};
  layout.bit_of.resize(cells.size());
  for (std::size_t e = 0; e < cells.size(); ++e) {
    const std::uint8_t c = cells[e];
    layout.bit_of[e] = layout.word_offset[c] * 64 + next[c]++;
  }
  return layout;
}

// Evaluates one role set from its cell histogram, recording failures by
// lattice index instead of throwing across threads.
void StoreValue(const PropertyContext& ctx, const std::array<std::int64_t, kCells>& counts,
                std::size_t index, LatticeValues* out, std::size_t* failed) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  if (total == 0) {
    out->values[index] = 0.0;
    out->empty[index] = 1;
    return;
  }
  try {
    out->values[index] = ctx.ValueFromCounts(counts);
  } catch (const Error&) {
    *failed = std::min(*failed, index);
  }
}

[[noreturn]] void ThrowEvaluationFailure(const SensitivePropertyProfile& profile,
                                         const PropertyContext& ctx, std::size_t index) {
  const RoleSet set = profile.lattice().SetAt(index);
  std::string cause;
  try {
    ctx.Value(RoleDataset(profile, set.members()));
  } catch (const Error& e) {
    cause = e.what();
  }
  throw Error(ErrorCode::kEvaluation,
              "property evaluation failed for role set " + set.ToString() + ": " + cause);
}

void ValidateEntryIds(const SensitivePropertyProfile& profile, const PropertyContext& ctx) {
  for (const Partition& p : profile.partitions()) {
    for (std::int64_t id : p.entry_ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= ctx.size()) {
        throw Error(ErrorCode::kParameter, "bound record index outside the corpus");
      }
    }
  }
}

double RoleRisk(const DisclosureTable& table, const VulnerabilityMatrix& d,
                std::span<const int> vm_of, RoleId i) {
  double best = 0.0;
  for (std::size_t t = table.TermBegin(i); t < table.TermEnd(i); ++t) {
    best = std::max(best, TermRisk(table, t, vm_of[i], vm_of, d));
  }
  return best;
}

double CodeRisk(const DisclosureTable& table, const VulnerabilityMatrix& d, std::uint64_t code,
                std::vector<int>* vm_of) {
  const int n = table.n();
  const auto m = static_cast<std::uint64_t>(d.m());
  for (int i = n - 1; i >= 0; --i) {
    (*vm_of)[i] = static_cast<int>(code % m);
    code /= m;
  }
  double total = 0.0;
  for (RoleId i = 0; i < n; ++i) total += RoleRisk(table, d, *vm_of, i);
  return total;
}

std::uint64_t SearchSpace(const DisclosureTable& table, const VulnerabilityMatrix& d) {
  std::uint64_t space = 1;
  for (int i = 0; i < table.n(); ++i) {
    if (space > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(d.m())) {
      throw Error(ErrorCode::kCapacity, "assignment space exceeds 2^64");
    }
    space *= static_cast<std::uint64_t>(d.m());
  }
  return space;
}

bool Better(double risk, std::uint64_t code, double best_risk, std::uint64_t best_code) {
  return risk < best_risk || (risk == best_risk && code < best_code);
}

ExactSearchResult Decode(const DisclosureTable& table, const VulnerabilityMatrix& d,
                         std::uint64_t code, double risk, std::uint64_t evaluated) {
  ExactSearchResult result;
  result.vm_of.resize(table.n());
  CodeRisk(table, d, code, &result.vm_of);
  result.total_risk = risk;
  result.evaluated = evaluated;
  return result;
}

}  // namespace

LatticeValues EvaluateLatticeSerial(const SensitivePropertyProfile& profile,
                                    const PropertyContext& ctx) {
  ValidateEntryIds(profile, ctx);
  const LatticeIndex& lattice = profile.lattice();
  LatticeValues out{std::vector<double>(lattice.size(), 0.0),
                    std::vector<std::uint8_t>(lattice.size(), 0)};
  const auto cells = ctx.cells();
  std::size_t failed = kNoFailure;
  std::vector<RoleId> members;
  for (std::size_t index = 0; index < lattice.size(); ++index) {
    lattice.Unrank(index, &members);
    std::array<std::int64_t, kCells> counts{};
    for (std::int64_t e : RoleDataset(profile, members)) ++counts[cells[e]];
    StoreValue(ctx, counts, index, &out, &failed);
    if (failed != kNoFailure) break;
  }
  if (failed != kNoFailure) ThrowEvaluationFailure(profile, ctx, failed);
  return out;
}

LatticeValues EvaluateLatticeParallel(const SensitivePropertyProfile& profile,
                                      const PropertyContext& ctx) {
  ValidateEntryIds(profile, ctx);
  const LatticeIndex& lattice = profile.lattice();
  const int n = profile.n();
  const int depth_limit = lattice.max_level();
  const CellLayout layout = MakeCellLayout(ctx.cells());
  const std::size_t words = std::max<std::size_t>(layout.words, 1);

  std::vector<std::uint64_t> role_bits(static_cast<std::size_t>(n) * words, 0);
  for (const Partition& p : profile.partitions()) {
    for (std::int64_t id : p.entry_ids) {
      const std::size_t bit = layout.bit_of[id];
      for (RoleId r : p.roles.members()) {
        role_bits[r * words + bit / 64] |= std::uint64_t{1} << (bit % 64);
      }
    }
  }

  LatticeValues out{std::vector<double>(lattice.size(), 0.0),
                    std::vector<std::uint8_t>(lattice.size(), 0)};
  std::size_t failed = kNoFailure;

#pragma omp parallel
  {
    std::vector<std::uint64_t> stack(static_cast<std::size_t>(depth_limit) * words);
    std::vector<RoleId> members;
    std::size_t local_failed = kNoFailure;

    auto evaluate = [&](int depth) {
      const std::uint64_t* bits = stack.data() + static_cast<std::size_t>(depth) * words;
      std::array<std::int64_t, kCells> counts{};
      for (int c = 0; c < kCells; ++c) {
        std::int64_t k = 0;
        for (std::size_t w = layout.word_offset[c]; w < layout.word_offset[c + 1]; ++w) {
          k += std::popcount(bits[w]);
        }
        counts[c] = k;
      }
      StoreValue(ctx, counts, lattice.Rank(members), &out, &local_failed);
    };

    // Depth-first over extensions of `members`; stack level k holds the OR of
    // the first k + 1 members' bitsets.
    auto descend = [&](auto&& self, int depth) -> void {
      evaluate(depth);
      if (depth + 1 >= depth_limit) return;
      const std::uint64_t* parent = stack.data() + static_cast<std::size_t>(depth) * words;
      std::uint64_t* child = stack.data() + static_cast<std::size_t>(depth + 1) * words;
      for (RoleId r = members.back() + 1; r < n; ++r) {
        const std::uint64_t* own = role_bits.data() + static_cast<std::size_t>(r) * words;
        for (std::size_t w = 0; w < words; ++w) child[w] = parent[w] | own[w];
        members.push_back(r);
        self(self, depth + 1);
        members.pop_back();
      }
    };

#pragma omp for schedule(dynamic, 1)
    for (RoleId first = 0; first < n; ++first) {
      std::copy_n(role_bits.data() + static_cast<std::size_t>(first) * words, words,
                  stack.data());
      members.assign(1, first);
      descend(descend, 0);
    }

#pragma omp critical(rspap_lattice_failure)
    failed = std::min(failed, local_failed);
  }
  if (failed != kNoFailure) ThrowEvaluationFailure(profile, ctx, failed);
  return out;
}

std::vector<double> PerRoleRiskSerial(const DisclosureTable& table, const VulnerabilityMatrix& d,
                                      std::span<const int> vm_of) {
  std::vector<double> risk(table.n(), 0.0);
  for (RoleId i = 0; i < table.n(); ++i) risk[i] = RoleRisk(table, d, vm_of, i);
  return risk;
}

std::vector<double> PerRoleRiskParallel(const DisclosureTable& table,
                                        const VulnerabilityMatrix& d,
                                        std::span<const int> vm_of) {
  const int n = table.n();
  std::vector<double> risk(n, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (RoleId i = 0; i < n; ++i) risk[i] = RoleRisk(table, d, vm_of, i);
  return risk;
}

ExactSearchResult ExactSearchSerial(const DisclosureTable& table, const VulnerabilityMatrix& d,
                                    bool reverse_order) {
  const std::uint64_t space = SearchSpace(table, d);
  std::vector<int> vm_of(table.n());
  double best_risk = std::numeric_limits<double>::infinity();
  std::uint64_t best_code = space;
  for (std::uint64_t k = 0; k < space; ++k) {
    const std::uint64_t code = reverse_order ? space - 1 - k : k;
    const double risk = CodeRisk(table, d, code, &vm_of);
    if (Better(risk, code, best_risk, best_code)) {
      best_risk = risk;
      best_code = code;
    }
  }
  return Decode(table, d, best_code, best_risk, space);
}

ExactSearchResult ExactSearchParallel(const DisclosureTable& table,
                                      const VulnerabilityMatrix& d) {
  const std::uint64_t space = SearchSpace(table, d);
  double best_risk = std::numeric_limits<double>::infinity();
  std::uint64_t best_code = space;
#pragma omp parallel
  {
    std::vector<int> vm_of(table.n());
    double local_risk = std::numeric_limits<double>::infinity();
    std::uint64_t local_code = space;
#pragma omp for schedule(static)
    for (std::uint64_t code = 0; code < space; ++code) {
      const double risk = CodeRisk(table, d, code, &vm_of);
      if (Better(risk, code, local_risk, local_code)) {
        local_risk = risk;
        local_code = code;
      }
    }
#pragma omp critical(rspap_exact_reduce)
    if (Better(local_risk, local_code, best_risk, best_code)) {
      best_risk = local_risk;
      best_code = local_code;
    }
  }
  return Decode(table, d, best_code, best_risk, space);
}

}  // namespace rspap
