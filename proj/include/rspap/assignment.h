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

// Role-to-VM assignment: disclosure gains, the risk objective, the
// top-down and neighbor-based heuristics, and an exhaustive oracle.

#ifndef RSPAP_ASSIGNMENT_H_
#define RSPAP_ASSIGNMENT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rspap/lattice.h"
#include "rspap/rbac_policy.h"
#include "rspap/vulnerability.h"

namespace rspap {

struct Assignment {
  std::vector<int> vm_of;  // role -> VM

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Disclosure gains g_i^A = |f(A) - f({i})| for every role i and role set A
// containing i with 2 <= |A| <= L. Only positive gains are stored ("terms");
// sets with an empty dataset, and roles whose own dataset is empty, carry no
// terms. Terms of a role are kept in lexicographic order of A.
class DisclosureTable {
 public:
  // Throws kState when the profile is not evaluated.
  explicit DisclosureTable(const SensitivePropertyProfile& profile);

  int n() const { return n_; }
  int max_level() const { return lattice_.max_level(); }

  // Terms of role i occupy [TermBegin(i), TermEnd(i)).
  std::size_t TermBegin(RoleId i) const { return term_offsets_[i]; }
  std::size_t TermEnd(RoleId i) const { return term_offsets_[i + 1]; }
  std::size_t term_count() const { return gain_.size(); }
  double gain(std::size_t t) const { return gain_[t]; }
  // Members of A other than the owning role, ascending.
  std::span<const RoleId> others(std::size_t t) const {
    return {others_.data() + t * stride_, others_count_[t]};
  }

  // Terms of role j whose set contains role i (i != j), ascending.
  std::span<const std::uint32_t> TermsContaining(RoleId j, RoleId i) const {
    const std::size_t k = static_cast<std::size_t>(j) * n_ + i;
    return {inverted_.data() + inverted_offsets_[k],
            inverted_.data() + inverted_offsets_[k + 1]};
  }

  // g_i^A for any A containing i with |A| <= L; 0 when A or {i} is empty.
  double Gain(RoleId i, std::span<const RoleId> set) const;

  // C_ij = g_i^{ij} + g_j^{ij}; symmetric with zero diagonal.
  double pair_weight(RoleId i, RoleId j) const {
    return pair_[static_cast<std::size_t>(i) * n_ + j];
  }

  double singleton_value(RoleId i) const { return values_[i]; }
  bool singleton_empty(RoleId i) const { return empty_[i] != 0; }

 private:
  int n_;
  std::size_t stride_;
  LatticeIndex lattice_;
  std::vector<double> values_;
  std::vector<std::uint8_t> empty_;
  std::vector<std::size_t> term_offsets_;
  std::vector<double> gain_;
  std::vector<RoleId> others_;
  std::vector<std::uint8_t> others_count_;
  std::vector<std::size_t> inverted_offsets_;
  std::vector<std::uint32_t> inverted_;
  std::vector<double> pair_;
};

// g * prod over the other members o of d[vm_i][vm_of[o]], multiplied in
// ascending order of o. Every risk evaluation goes through this product so
// that equal inputs give bit-identical results.
inline double TermRisk(const DisclosureTable& table, std::size_t t, int vm_i,
                       std::span<const int> vm_of, const VulnerabilityMatrix& d) {
  const double* row = d.row(vm_i);
  double r = table.gain(t);
  for (RoleId o : table.others(t)) r *= row[vm_of[o]];
  return r;
}

// Checks sizes and VM ranges; throws kParameter on a mismatch.
void CheckAssignment(const Assignment& a, const DisclosureTable& table,
                     const VulnerabilityMatrix& d);

// Risk(r_i) = max over terms of i of TermRisk (0 when i has no terms).
double RiskOfRole(RoleId i, const Assignment& a, const DisclosureTable& table,
                  const VulnerabilityMatrix& d);
std::vector<double> PerRoleRisk(const Assignment& a, const DisclosureTable& table,
                                const VulnerabilityMatrix& d);
// Sum of per-role risks in role order.
double TotalRisk(const Assignment& a, const DisclosureTable& table,
                 const VulnerabilityMatrix& d);

// Top-down heuristic: divisive clustering of the roles, clusters ranked by
// disclosure matched to VMs ranked by d[q][q], then single-role moves while
// the total risk strictly decreases.
Assignment SolveTdh(const DisclosureTable& table, const VulnerabilityMatrix& d);

// Cluster disclosure score used by the divisive phase: sum over r in C of
// g_r^C when |C| <= L, else of the largest g_r^A over stored A within C.
double ClusterScore(const DisclosureTable& table, std::span<const RoleId> cluster);

// Neighbor-based heuristic: best-fit placement driven by pair weights C_ij.
Assignment SolveNbh(const DisclosureTable& table, const VulnerabilityMatrix& d);

struct ExactResult {
  Assignment assignment;
  double total_risk = 0.0;
  std::uint64_t evaluated = 0;
};

inline constexpr std::uint64_t kDefaultExactBudget = 10'000'000;

// Enumerates all m^n assignments and returns the lexicographically first
// minimizer. Throws kCapacity when m^n exceeds the budget.
ExactResult SolveExact(const DisclosureTable& table, const VulnerabilityMatrix& d,
                       std::uint64_t budget = kDefaultExactBudget);

}  // namespace rspap

#endif  // RSPAP_ASSIGNMENT_H_
