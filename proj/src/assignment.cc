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

#include "rspap/assignment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rspap/error.h"
#include "rspap/kernels.h"

namespace rspap {
namespace {

constexpr std::size_t kNoTerm = std::numeric_limits<std::size_t>::max();

bool SetContains(std::span<const RoleId> sorted, RoleId r) {
  return std::binary_search(sorted.begin(), sorted.end(), r);
}

}  // namespace

DisclosureTable::DisclosureTable(const SensitivePropertyProfile& profile)
    : n_(profile.n()),
      stride_(static_cast<std::size_t>(std::max(profile.lattice().max_level() - 1, 1))),
      lattice_(profile.lattice()) {
  if (!profile.evaluated()) {
    throw Error(ErrorCode::kState, "disclosure table needs an evaluated profile");
  }
  values_.assign(profile.values().begin(), profile.values().end());
  empty_.assign(profile.empty_flags().begin(), profile.empty_flags().end());
  const int max_level = lattice_.max_level();

  term_offsets_.assign(n_ + 1, 0);
  std::vector<RoleId> set;
  for (RoleId i = 0; i < n_; ++i) {
    term_offsets_[i] = gain_.size();
    if (empty_[i]) continue;
    const double fi = values_[i];
    // Sets containing i in lexicographic order; once past i without having
    // taken it, no extension can contain i.
    auto visit = [&](auto&& self, RoleId start, bool has_i) -> void {
      for (RoleId r = start; r < n_; ++r) {
        if (r > i && !has_i) return;
        set.push_back(r);
        const bool now_has_i = has_i || r == i;
        if (now_has_i && set.size() >= 2) {
          const std::size_t index = lattice_.Rank(set);
          const double g = empty_[index] ? 0.0 : std::abs(values_[index] - fi);
          if (g > 0.0) {
            gain_.push_back(g);
            std::size_t k = 0;
            for (RoleId o : set) {
              if (o != i) others_.push_back(o), ++k;
            }
            others_.resize(others_.size() + (stride_ - k), -1);
            others_count_.push_back(static_cast<std::uint8_t>(k));
          }
        }
        if (static_cast<int>(set.size()) < max_level) self(self, r + 1, now_has_i);
        set.pop_back();
      }
    };
    visit(visit, 0, false);
  }
  term_offsets_[n_] = gain_.size();

  const std::size_t cells = static_cast<std::size_t>(n_) * n_;
  inverted_offsets_.assign(cells + 1, 0);
  for (RoleId j = 0; j < n_; ++j) {
    for (std::size_t t = TermBegin(j); t < TermEnd(j); ++t) {
      for (RoleId o : others(t)) ++inverted_offsets_[static_cast<std::size_t>(j) * n_ + o + 1];
    }
  }
  std::partial_sum(inverted_offsets_.begin(), inverted_offsets_.end(), inverted_offsets_.begin());
  inverted_.resize(inverted_offsets_.back());
  std::vector<std::size_t> fill(inverted_offsets_.begin(), inverted_offsets_.end() - 1);
  for (RoleId j = 0; j < n_; ++j) {
    for (std::size_t t = TermBegin(j); t < TermEnd(j); ++t) {
      for (RoleId o : others(t)) {
        inverted_[fill[static_cast<std::size_t>(j) * n_ + o]++] = static_cast<std::uint32_t>(t);
      }
    }
  }

  pair_.assign(cells, 0.0);
  if (max_level >= 2) {
    for (RoleId i = 0; i < n_; ++i) {
      for (RoleId j = i + 1; j < n_; ++j) {
        const RoleId p[2] = {i, j};
        const double c = Gain(i, p) + Gain(j, p);
        pair_[static_cast<std::size_t>(i) * n_ + j] = c;
        pair_[static_cast<std::size_t>(j) * n_ + i] = c;
      }
    }
  }
}

double DisclosureTable::Gain(RoleId i, std::span<const RoleId> set) const {
  if (set.empty() || static_cast<int>(set.size()) > lattice_.max_level() ||
      !SetContains(set, i)) {
    throw Error(ErrorCode::kParameter, "gain needs a set of size <= L containing the role");
  }
  if (set.size() == 1) return 0.0;
  const std::size_t index = lattice_.Rank(set);
  if (empty_[index] || empty_[i]) return 0.0;
  return std::abs(values_[index] - values_[i]);
}

void CheckAssignment(const Assignment& a, const DisclosureTable& table,
                     const VulnerabilityMatrix& d) {
  if (static_cast<int>(a.vm_of.size()) != table.n()) {
    std::ostringstream msg;
    msg << "assignment covers " << a.vm_of.size() << " roles, expected " << table.n();
    throw Error(ErrorCode::kParameter, msg.str());
  }
  for (std::size_t i = 0; i < a.vm_of.size(); ++i) {
    if (a.vm_of[i] < 0 || a.vm_of[i] >= d.m()) {
      std::ostringstream msg;
      msg << "role " << i << " assigned to VM " << a.vm_of[i] << " outside [0, " << d.m() << ")";
      throw Error(ErrorCode::kParameter, msg.str());
    }
  }
}

double RiskOfRole(RoleId i, const Assignment& a, const DisclosureTable& table,
                  const VulnerabilityMatrix& d) {
  CheckAssignment(a, table, d);
  if (i < 0 || i >= table.n()) throw Error(ErrorCode::kParameter, "role index out of range");
  double best = 0.0;
  for (std::size_t t = table.TermBegin(i); t < table.TermEnd(i); ++t) {
    best = std::max(best, TermRisk(table, t, a.vm_of[i], a.vm_of, d));
  }
  return best;
}

std::vector<double> PerRoleRisk(const Assignment& a, const DisclosureTable& table,
                                const VulnerabilityMatrix& d) {
  CheckAssignment(a, table, d);
  return PerRoleRiskParallel(table, d, a.vm_of);
}

double TotalRisk(const Assignment& a, const DisclosureTable& table,
                 const VulnerabilityMatrix& d) {
  const std::vector<double> risk = PerRoleRisk(a, table, d);
  double total = 0.0;
  for (double r : risk) total += r;
  return total;
}

double ClusterScore(const DisclosureTable& table, std::span<const RoleId> cluster) {
  if (static_cast<int>(cluster.size()) <= table.max_level()) {
    double score = 0.0;
    for (RoleId r : cluster) score += table.Gain(r, cluster);
    return score;
  }
  std::vector<char> in(table.n(), 0);
  for (RoleId r : cluster) in[r] = 1;
  double score = 0.0;
  for (RoleId r : cluster) {
    double best = 0.0;
    for (std::size_t t = table.TermBegin(r); t < table.TermEnd(r); ++t) {
      const auto others = table.others(t);
      if (std::all_of(others.begin(), others.end(), [&](RoleId o) { return in[o] != 0; })) {
        best = std::max(best, table.gain(t));
      }
    }
    score += best;
  }
  return score;
}

namespace {

// Divisive phase state for one split: two clusters given by membership
// flags, plus each member's best stored gain within its own cluster.
class Splitter {
 public:
  Splitter(const DisclosureTable& table, std::span<const RoleId> cluster)
      : table_(table),
        n_(table.n()),
        in1_(n_, 0),
        in2_(n_, 0),
        best1_(n_, 0.0),
        arg1_(n_, kNoTerm),
        best2_(n_, 0.0),
        arg2_(n_, kNoTerm),
        c1_(cluster.begin(), cluster.end()) {
    for (RoleId r : c1_) in1_[r] = 1;
    for (RoleId r : c1_) Scan(r, in1_, -1, &best1_[r], &arg1_[r]);
  }

  // Greedy moves from C1 to C2; returns {C1, C2}.
  std::pair<std::vector<RoleId>, std::vector<RoleId>> Run() {
    std::vector<double> contribution(n_, 0.0);
    const bool small = static_cast<int>(c1_.size()) <= table_.max_level();
    for (RoleId r : c1_) contribution[r] = small ? table_.Gain(r, c1_) : best1_[r];
    std::vector<RoleId> order = c1_;
    std::stable_sort(order.begin(), order.end(), [&](RoleId a, RoleId b) {
      return contribution[a] > contribution[b];
    });

    double dis = Score1(-1) + Score2(-1);
    for (RoleId r : order) {
      if (c1_.size() == 1) break;
      const double moved = Score1(r) + Score2(r);
      if (moved < dis) {
        Move(r);
        dis = Score1(-1) + Score2(-1);
      }
    }
    return {c1_, c2_};
  }

 private:
  // Best gain of role s over terms whose other members all satisfy `in`,
  // skipping terms that contain `excluded`.
  void Scan(RoleId s, const std::vector<char>& in, RoleId excluded, double* best,
            std::size_t* arg) const {
    *best = 0.0;
    *arg = kNoTerm;
    for (std::size_t t = table_.TermBegin(s); t < table_.TermEnd(s); ++t) {
      const auto others = table_.others(t);
      bool inside = true;
      for (RoleId o : others) {
        if (!in[o] || o == excluded) {
          inside = false;
          break;
        }
      }
      if (inside && table_.gain(t) > *best) {
        *best = table_.gain(t);
        *arg = t;
      }
    }
  }

  bool TermHas(std::size_t t, RoleId r) const {
    if (t == kNoTerm) return false;
    const auto others = table_.others(t);
    return std::find(others.begin(), others.end(), r) != others.end();
  }

  // Score of C1 without r (r = -1: as is).
  double Score1(RoleId r) const {
    std::vector<RoleId> members;
    members.reserve(c1_.size());
    for (RoleId s : c1_) {
      if (s != r) members.push_back(s);
    }
    if (static_cast<int>(members.size()) <= table_.max_level()) {
      return ClusterScore(table_, members);
    }
    double score = 0.0;
    for (RoleId s : members) {
      if (r >= 0 && TermHas(arg1_[s], r)) {
        double best;
        std::size_t arg;
        Scan(s, in1_, r, &best, &arg);
        score += best;
      } else {
        score += best1_[s];
      }
    }
    return score;
  }

  // Score of C2 with r added (r = -1: as is).
  double Score2(RoleId r) const {
    std::vector<RoleId> members = c2_;
    if (r >= 0) members.insert(std::upper_bound(members.begin(), members.end(), r), r);
    if (static_cast<int>(members.size()) <= table_.max_level()) {
      return ClusterScore(table_, members);
    }
    double score = 0.0;
    for (RoleId s : members) {
      if (s == r) {
        score += BestWithin2(r);
      } else if (r >= 0) {
        score += std::max(best2_[s], BestGainingMember(s, r));
      } else {
        score += best2_[s];
      }
    }
    return score;
  }

  // Best gain of r over terms inside C2 (r itself not yet a member).
  double BestWithin2(RoleId r) const {
    double best;
    std::size_t arg;
    Scan(r, in2_, -1, &best, &arg);
    return best;
  }

  // Best gain of s in C2 over terms that contain the incoming role r and
  // otherwise lie in C2.
  double BestGainingMember(RoleId s, RoleId r, std::size_t* arg = nullptr) const {
    double best = 0.0;
    for (std::uint32_t t : table_.TermsContaining(s, r)) {
      bool inside = true;
      for (RoleId o : table_.others(t)) {
        if (o != r && !in2_[o]) {
          inside = false;
          break;
        }
      }
      if (inside && table_.gain(t) > best) {
        best = table_.gain(t);
        if (arg) *arg = t;
      }
    }
    return best;
  }

  void Move(RoleId r) {
    c1_.erase(std::find(c1_.begin(), c1_.end(), r));
    in1_[r] = 0;
    for (RoleId s : c1_) {
      if (TermHas(arg1_[s], r)) Scan(s, in1_, -1, &best1_[s], &arg1_[s]);
    }
    for (RoleId s : c2_) {
      std::size_t arg = kNoTerm;
      const double gained = BestGainingMember(s, r, &arg);
      if (gained > best2_[s]) {
        best2_[s] = gained;
        arg2_[s] = arg;
      }
    }
    Scan(r, in2_, -1, &best2_[r], &arg2_[r]);
    in2_[r] = 1;
    c2_.insert(std::upper_bound(c2_.begin(), c2_.end(), r), r);
  }

  const DisclosureTable& table_;
  int n_;
  std::vector<char> in1_, in2_;
  std::vector<double> best1_;
  std::vector<std::size_t> arg1_;
  std::vector<double> best2_;
  std::vector<std::size_t> arg2_;
  std::vector<RoleId> c1_, c2_;
};

std::vector<int> VmsByIntraLeakage(const VulnerabilityMatrix& d) {
  std::vector<int> vms(d.m());
  std::iota(vms.begin(), vms.end(), 0);
  std::stable_sort(vms.begin(), vms.end(), [&](int a, int b) { return d(a, a) < d(b, b); });
  return vms;
}

// Single-role improvement sweeps. Moving role i only changes Risk(i) and
// the terms of other roles that contain i, so each candidate move is
// evaluated from per-role bases that exclude i's terms.
void ImproveAssignment(const DisclosureTable& table, const VulnerabilityMatrix& d,
                       std::vector<int>* vm_of_ptr) {
  std::vector<int>& vm_of = *vm_of_ptr;
  const int n = table.n();
  const int m = d.m();
  std::vector<double> risk(n, 0.0);
  std::vector<std::size_t> arg(n, kNoTerm);
  auto full_scan = [&](RoleId j, RoleId excluded, double* best, std::size_t* best_arg) {
    *best = 0.0;
    *best_arg = kNoTerm;
    for (std::size_t t = table.TermBegin(j); t < table.TermEnd(j); ++t) {
      if (excluded >= 0) {
        const auto others = table.others(t);
        if (std::find(others.begin(), others.end(), excluded) != others.end()) continue;
      }
      const double v = TermRisk(table, t, vm_of[j], vm_of, d);
      if (v > *best) {
        *best = v;
        *best_arg = t;
      }
    }
  };
  auto term_has = [&](std::size_t t, RoleId r) {
    if (t == kNoTerm) return false;
    const auto others = table.others(t);
    return std::find(others.begin(), others.end(), r) != others.end();
  };
  for (RoleId j = 0; j < n; ++j) full_scan(j, -1, &risk[j], &arg[j]);
  auto sum = [n](const std::vector<double>& v) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += v[j];
    return total;
  };
  double total = sum(risk);

  std::vector<double> base(n, 0.0), trial(n, 0.0), best_trial(n, 0.0);
  std::vector<std::size_t> base_arg(n, kNoTerm), trial_arg(n, kNoTerm),
      best_trial_arg(n, kNoTerm);
  bool moved = true;
  while (moved) {
    moved = false;
    for (RoleId i = 0; i < n; ++i) {
      const int current = vm_of[i];
      for (RoleId j = 0; j < n; ++j) {
        if (j == i) continue;
        if (term_has(arg[j], i)) {
          full_scan(j, i, &base[j], &base_arg[j]);
        } else {
          base[j] = risk[j];
          base_arg[j] = arg[j];
        }
      }
      int best_vm = current;
      double best_total = total;
      for (int b = 0; b < m; ++b) {
        if (b == current) continue;
        vm_of[i] = b;
        full_scan(i, -1, &trial[i], &trial_arg[i]);
        // trial[j] >= base[j] and rounded addition is monotone, so this
        // lower bound on the candidate total is safe to prune with.
        double bound = 0.0;
        for (RoleId j = 0; j < n; ++j) bound += (j == i) ? trial[i] : base[j];
        if (!(bound < best_total)) continue;
        for (RoleId j = 0; j < n; ++j) {
          if (j == i) continue;
          trial[j] = base[j];
          trial_arg[j] = base_arg[j];
          // Terms of j that contain i vanish unless i sits in j's cluster.
          if (d.cluster_of(vm_of[j]) != d.cluster_of(b)) continue;
          for (std::uint32_t t : table.TermsContaining(j, i)) {
            const double v = TermRisk(table, t, vm_of[j], vm_of, d);
            if (v > trial[j]) {
              trial[j] = v;
              trial_arg[j] = t;
            }
          }
        }
        const double candidate = sum(trial);
        if (candidate < best_total) {
          best_total = candidate;
          best_vm = b;
          best_trial = trial;
          best_trial_arg = trial_arg;
        }
      }
      vm_of[i] = best_vm;
      if (best_vm != current) {
        risk = best_trial;
        arg = best_trial_arg;
        total = best_total;
        moved = true;
      }
    }
  }
}

}  // namespace

Assignment SolveTdh(const DisclosureTable& table, const VulnerabilityMatrix& d) {
  const int n = table.n();
  const int m = d.m();
  if (n < 1 || m < 1) throw Error(ErrorCode::kParameter, "TDH needs n >= 1 and m >= 1");
  Assignment result;
  result.vm_of.assign(n, 0);
  if (m == 1) return result;

  std::vector<std::vector<RoleId>> clusters(1, std::vector<RoleId>(n));
  std::iota(clusters[0].begin(), clusters[0].end(), 0);
  std::vector<double> scores = {ClusterScore(table, clusters[0])};
  // Highest score first, ties to the cluster holding the lowest role.
  auto ranked_before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return clusters[a].front() < clusters[b].front();
  };
  while (static_cast<int>(clusters.size()) < m) {
    std::size_t top = 0;
    for (std::size_t c = 1; c < clusters.size(); ++c) {
      if (ranked_before(c, top)) top = c;
    }
    if (scores[top] <= 0.0) break;
    auto [c1, c2] = Splitter(table, clusters[top]).Run();
    if (c2.empty()) break;
    clusters[top] = std::move(c1);
    scores[top] = ClusterScore(table, clusters[top]);
    scores.push_back(ClusterScore(table, c2));
    clusters.push_back(std::move(c2));
  }

  std::vector<std::size_t> order(clusters.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), ranked_before);
  const std::vector<int> vms = VmsByIntraLeakage(d);
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (RoleId r : clusters[order[k]]) result.vm_of[r] = vms[k];
  }

  ImproveAssignment(table, d, &result.vm_of);
  return result;
}

Assignment SolveNbh(const DisclosureTable& table, const VulnerabilityMatrix& d) {
  const int n = table.n();
  const int m = d.m();
  if (n < 1 || m < 1) throw Error(ErrorCode::kParameter, "NBH needs n >= 1 and m >= 1");
  Assignment result;
  result.vm_of.assign(n, -1);
  if (m == 1) {
    std::fill(result.vm_of.begin(), result.vm_of.end(), 0);
    return result;
  }
  if (n == 1) {
    result.vm_of[0] = VmsByIntraLeakage(d).front();
    return result;
  }

  int seed_q = 0, seed_l = 1;
  for (int q = 0; q < m; ++q) {
    for (int l = q + 1; l < m; ++l) {
      if (d(q, l) < d(seed_q, seed_l)) seed_q = q, seed_l = l;
    }
  }
  RoleId seed_i = 0, seed_j = 1;
  for (RoleId i = 0; i < n; ++i) {
    for (RoleId j = i + 1; j < n; ++j) {
      if (table.pair_weight(i, j) > table.pair_weight(seed_i, seed_j)) seed_i = i, seed_j = j;
    }
  }
  // Orient the seed pair by intra-VM leakage so the result does not depend
  // on VM numbering.
  if (d(seed_l, seed_l) < d(seed_q, seed_q)) std::swap(seed_q, seed_l);
  result.vm_of[seed_i] = seed_q;
  result.vm_of[seed_j] = seed_l;
  std::vector<char> vm_free(m, 1);
  vm_free[seed_q] = vm_free[seed_l] = 0;
  int free_vms = m - 2;
  int free_roles = n - 2;

  while (free_vms > 0 && free_roles > 0) {
    RoleId best_i = -1, best_j = -1;
    double best_c = -1.0;
    for (RoleId i = 0; i < n; ++i) {
      if (result.vm_of[i] < 0) continue;
      for (RoleId j = 0; j < n; ++j) {
        if (result.vm_of[j] >= 0) continue;
        if (table.pair_weight(i, j) > best_c) {
          best_c = table.pair_weight(i, j);
          best_i = i;
          best_j = j;
        }
      }
    }
    const int q = result.vm_of[best_i];
    int best_l = -1;
    for (int l = 0; l < m; ++l) {
      if (vm_free[l] && (best_l < 0 || d(q, l) < d(q, best_l))) best_l = l;
    }
    result.vm_of[best_j] = best_l;
    vm_free[best_l] = 0;
    --free_vms;
    --free_roles;
  }

  for (RoleId i = 0; i < n; ++i) {
    if (result.vm_of[i] >= 0) continue;
    std::vector<double> worst(m, 0.0);
    for (RoleId j = 0; j < n; ++j) {
      const int q = result.vm_of[j];
      if (j == i || q < 0) continue;
      worst[q] = std::max(worst[q], table.pair_weight(i, j) * d(q, q));
    }
    result.vm_of[i] = static_cast<int>(std::min_element(worst.begin(), worst.end()) - worst.begin());
  }
  return result;
}

ExactResult SolveExact(const DisclosureTable& table, const VulnerabilityMatrix& d,
                       std::uint64_t budget) {
  const int n = table.n();
  const auto m = static_cast<std::uint64_t>(d.m());
  std::uint64_t space = 1;
  bool over = false;
  for (int i = 0; i < n && !over; ++i) {
    if (space > std::numeric_limits<std::uint64_t>::max() / m) {
      over = true;
    } else {
      space *= m;
    }
  }
  if (over || space > budget) {
    std::ostringstream msg;
    msg << "exact search over m^n = " << m << "^" << n;
    if (!over) msg << " = " << space;
    msg << " assignments exceeds the budget of " << budget;
    throw Error(ErrorCode::kCapacity, msg.str());
  }
  const ExactSearchResult found = ExactSearchParallel(table, d);
  return {{found.vm_of}, found.total_risk, found.evaluated};
}

}  // namespace rspap
