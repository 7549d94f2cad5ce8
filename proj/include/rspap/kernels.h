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

// Hot loops with an OpenMP implementation and a plain serial reference.
// Each pair returns bit-identical results; the serial versions exist for
// testing and benchmarking.

#ifndef RSPAP_KERNELS_H_
#define RSPAP_KERNELS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rspap/assignment.h"
#include "rspap/info_measures.h"
#include "rspap/rbac_policy.h"
#include "rspap/vulnerability.h"

namespace rspap {

struct LatticeValues {
  std::vector<double> values;       // indexed like profile.lattice()
  std::vector<std::uint8_t> empty;  // 1 when the role set sees no records
};

// f(A) for every role set of the truncated lattice.
//
// The parallel kernel renumbers corpus records cell by cell, keeps one
// bitset of accessible records per role, and gets each role set's cell
// histogram from popcounts of the OR of its members' bitsets, walking the
// lattice depth-first so that prefixes are shared. The serial reference
// builds each dataset with RoleDataset and counts cells directly.
LatticeValues EvaluateLatticeSerial(const SensitivePropertyProfile& profile,
                                    const PropertyContext& ctx);
LatticeValues EvaluateLatticeParallel(const SensitivePropertyProfile& profile,
                                      const PropertyContext& ctx);

std::vector<double> PerRoleRiskSerial(const DisclosureTable& table, const VulnerabilityMatrix& d,
                                      std::span<const int> vm_of);
std::vector<double> PerRoleRiskParallel(const DisclosureTable& table,
                                        const VulnerabilityMatrix& d,
                                        std::span<const int> vm_of);

struct ExactSearchResult {
  std::vector<int> vm_of;
  double total_risk = 0.0;
  std::uint64_t evaluated = 0;
};

// Exhaustive search over m^n assignments, encoded with role 0 as the most
// significant base-m digit so that numeric order is lexicographic order.
// Ties resolve to the smallest code. The caller enforces the budget.
ExactSearchResult ExactSearchSerial(const DisclosureTable& table, const VulnerabilityMatrix& d,
                                    bool reverse_order = false);
ExactSearchResult ExactSearchParallel(const DisclosureTable& table,
                                      const VulnerabilityMatrix& d);

}  // namespace rspap

#endif  // RSPAP_KERNELS_H_
