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

#include "rspap/rbac_policy.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "rspap/error.h"
#include "rspap/json_io.h"
#include "rspap/kernels.h"

namespace rspap {
namespace {

SensitivePropertyProfile Profile(int n, std::vector<std::pair<RoleSet, std::int64_t>> parts,
                                 int L = 3) {
  std::vector<Partition> partitions;
  for (auto& [roles, card] : parts) partitions.push_back({roles, card, {}});
  return SensitivePropertyProfile(n, L, 1.0, std::move(partitions));
}

TEST(SensitivityTest, Thresholds) {
  EXPECT_EQ(ClassifySensitivity(2.0), SensitivityClass::kHsd);
  EXPECT_EQ(ClassifySensitivity(3.5), SensitivityClass::kHsd);
  EXPECT_EQ(ClassifySensitivity(1.7), SensitivityClass::kMsd);
  EXPECT_EQ(ClassifySensitivity(1.5), SensitivityClass::kMsd);
  EXPECT_EQ(ClassifySensitivity(std::nextafter(2.0, 0.0)), SensitivityClass::kMsd);
  EXPECT_EQ(ClassifySensitivity(std::nextafter(1.5, 0.0)), SensitivityClass::kLsd);
  EXPECT_EQ(ClassifySensitivity(1.0), SensitivityClass::kLsd);
  EXPECT_THROW(ClassifySensitivity(0.99), Error);
  EXPECT_STREQ(SensitivityClassName(SensitivityClass::kHsd), "HSD");
  EXPECT_STREQ(SensitivityClassName(SensitivityClass::kMsd), "MSD");
  EXPECT_STREQ(SensitivityClassName(SensitivityClass::kLsd), "LSD");
}

TEST(RbacPolicyTest, ExactSetPartitions) {
  RbacPolicy policy(5, 6);
  // Objects 0 and 1 are reachable by exactly roles {1, 4}.
  for (std::int64_t o : {0, 1}) {
    policy.AddEdge(1, o);
    policy.AddEdge(4, o);
  }
  policy.AddEdge(1, 2);
  policy.AddEdge(0, 3);
  policy.AddEdge(2, 3);
  policy.AddEdge(4, 3);
  EXPECT_EQ(policy.edge_count(), 8u);
  EXPECT_EQ(policy.RolesOf(3), (std::vector<RoleId>{0, 2, 4}));
  const auto parts = policy.PartitionCardinalities();
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts.at(RoleSet{1, 4}), 2);
  EXPECT_EQ(parts.at(RoleSet{1}), 1);
  EXPECT_EQ(parts.at(RoleSet{0, 2, 4}), 1);
  EXPECT_THROW(policy.AddEdge(1, 2), Error);
  EXPECT_THROW(policy.AddEdge(5, 0), Error);
  EXPECT_THROW(policy.AddEdge(0, 6), Error);
}

TEST(ProfileTest, RejectsBadPartitions) {
  EXPECT_THROW(Profile(2, {{RoleSet{0, 2}, 1}}), Error);
  EXPECT_THROW(Profile(2, {{RoleSet{0}, 0}}), Error);
  EXPECT_THROW(Profile(2, {{RoleSet{0}, 1}, {RoleSet{0}, 2}}), Error);
}

TEST(GenerateWorkloadTest, SingleRole) {
  Rng rng(1);
  const auto profile = GenerateWorkload(1, 777, 1.5, 3, rng);
  ASSERT_EQ(profile.partitions().size(), 1u);
  EXPECT_EQ(profile.partitions()[0].roles, RoleSet{0});
  EXPECT_EQ(profile.partitions()[0].cardinality, 777);
}

TEST(GenerateWorkloadTest, ConservationAndValidity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const int n = 5 + static_cast<int>(seed % 30);
    const auto profile = GenerateWorkload(n, 3000, 1.0 + 0.1 * (seed % 11), 3, rng);
    std::int64_t total = 0;
    std::set<RoleSet> seen;
    for (const Partition& p : profile.partitions()) {
      EXPECT_GT(p.cardinality, 0);
      EXPECT_LT(p.roles.members().back(), n);
      EXPECT_TRUE(seen.insert(p.roles).second);
      total += p.cardinality;
    }
    EXPECT_EQ(total, 3000);
    EXPECT_EQ(profile.object_count(), 3000);
    const auto levels = LevelTotals(profile);
    EXPECT_EQ(std::accumulate(levels.begin() + 1, levels.end(), std::int64_t{0}), 3000);
  }
}

TEST(GenerateWorkloadTest, Deterministic) {
  Rng a(42);
  Rng b(42);
  const auto p1 = GenerateWorkload(40, 5000, 1.2, 3, a);
  const auto p2 = GenerateWorkload(40, 5000, 1.2, 3, b);
  EXPECT_EQ(ProfileToJson(p1).dump(), ProfileToJson(p2).dump());
}

TEST(GenerateWorkloadTest, LevelOneShareFollowsZipf) {
  // Level-1 share is 1 / H_{30,s}; compare s=2 against s=1.
  auto harmonic = [](double s) {
    double h = 0.0;
    for (int k = 1; k <= 30; ++k) h += std::pow(k, -s);
    return h;
  };
  const double expected_ratio = harmonic(1.0) / harmonic(2.0);
  double level1[2] = {0, 0};
  const double exponents[2] = {1.0, 2.0};
  for (int e = 0; e < 2; ++e) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      Rng rng(seed);
      level1[e] += LevelTotals(GenerateWorkload(30, 125000, exponents[e], 3, rng))[1];
    }
  }
  EXPECT_NEAR(level1[1] / level1[0], expected_ratio, 0.02 * expected_ratio);
  EXPECT_GT(level1[1] / level1[0], 2.0);
}

TEST(GenerateWorkloadTest, HugeLevelsUseHeadTailSampler) {
  Rng rng(3);
  const auto profile = GenerateWorkload(150, 20000, 1.0, 3, rng, 1e6);
  std::int64_t total = 0;
  int max_level = 0;
  for (const Partition& p : profile.partitions()) {
    total += p.cardinality;
    max_level = std::max(max_level, static_cast<int>(p.roles.size()));
  }
  EXPECT_EQ(total, 20000);
  EXPECT_GT(max_level, 3);
}

TEST(GenerateWorkloadTest, RejectsBadParameters) {
  Rng rng(1);
  EXPECT_THROW(GenerateWorkload(0, 10, 1.0, 3, rng), Error);
  EXPECT_THROW(GenerateWorkload(3, 0, 1.0, 3, rng), Error);
  EXPECT_THROW(GenerateWorkload(3, 10, 0.5, 3, rng), Error);
}

TEST(BindDatasetTest, SinglePartitionDistinct) {
  auto profile = Profile(1, {{RoleSet{0}, 5}});
  Rng rng(1);
  BindDataset(&profile, 10, rng);
  const auto& ids = profile.partitions()[0].entry_ids;
  EXPECT_EQ(ids.size(), 5u);
  EXPECT_EQ(std::set<std::int64_t>(ids.begin(), ids.end()).size(), 5u);
  EXPECT_FALSE(profile.binding_warning());
}

TEST(BindDatasetTest, ExhaustionFallsBackWithWarning) {
  auto profile = Profile(2, {{RoleSet{0}, 5}, {RoleSet{1}, 7}});
  Rng rng(1);
  BindDataset(&profile, 10, rng);
  EXPECT_TRUE(profile.binding_warning());
  EXPECT_EQ(profile.partitions()[0].entry_ids.size(), 5u);
  EXPECT_EQ(profile.partitions()[1].entry_ids.size(), 7u);
}

TEST(BindDatasetTest, DisjointPartitions) {
  auto profile = Profile(2, {{RoleSet{0}, 3}, {RoleSet{0, 1}, 7}});
  Rng rng(2);
  BindDataset(&profile, 10, rng);
  std::set<std::int64_t> all;
  for (const Partition& p : profile.partitions()) all.insert(p.entry_ids.begin(), p.entry_ids.end());
  EXPECT_EQ(all.size(), 10u);
  EXPECT_FALSE(profile.binding_warning());
}

TEST(BindDatasetTest, EmptyCorpusIsInputError) {
  auto profile = Profile(1, {{RoleSet{0}, 5}});
  Rng rng(1);
  try {
    BindDataset(&profile, 0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
  }
}

TEST(RoleDatasetTest, UnionSemantics) {
  auto profile = Profile(3, {{RoleSet{0}, 3}, {RoleSet{0, 1}, 2}, {RoleSet{2}, 4}});
  Rng rng(5);
  BindDataset(&profile, 9, rng);
  const RoleId r0[] = {0};
  const RoleId r1[] = {1};
  const RoleId r2[] = {2};
  const RoleId all[] = {0, 1, 2};
  EXPECT_EQ(RoleDataset(profile, r0).size(), 5u);
  EXPECT_EQ(RoleDataset(profile, r1).size(), 2u);
  EXPECT_EQ(RoleDataset(profile, all).size(), 9u);
  const auto a = RoleDataset(profile, r0);
  const auto c = RoleDataset(profile, r2);
  std::vector<std::int64_t> both;
  std::set_intersection(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(both));
  EXPECT_TRUE(both.empty());
  const RoleId bad[] = {3};
  EXPECT_THROW(RoleDataset(profile, bad), Error);
}

TEST(EvaluateProfileTest, CountsAndEmptyFlags) {
  // Role 3 has no data: sets made only of role 3 are empty.
  auto profile = Profile(4, {{RoleSet{0}, 3}, {RoleSet{1, 2}, 3}}, 2);
  Rng rng(7);
  BindDataset(&profile, 6, rng);
  Rng corpus_rng(8);
  const auto corpus = GenerateSyntheticEntries(6, corpus_rng);
  const PropertyContext ctx(corpus, PropertyKind::kKld);
  EvaluateProfile(&profile, ctx);
  EXPECT_EQ(profile.values().size(), 10u);
  const RoleId r3[] = {3};
  const RoleId r03[] = {0, 3};
  const RoleId r012[] = {0, 1};
  EXPECT_TRUE(profile.IsEmpty(r3));
  EXPECT_EQ(profile.Value(r3), 0.0);
  EXPECT_FALSE(profile.IsEmpty(r03));
  std::vector<std::int64_t> ids = RoleDataset(profile, r012);
  EXPECT_DOUBLE_EQ(profile.Value(r012), ctx.Value(ids));
  const RoleId too_big[] = {0, 1, 2};
  EXPECT_THROW(profile.Value(too_big), Error);
}

TEST(EvaluateProfileTest, GlobalDatasetGivesZero) {
  auto profile = Profile(3, {{RoleSet{0, 1, 2}, 50}});
  Rng rng(9);
  BindDataset(&profile, 50, rng);
  Rng corpus_rng(10);
  const auto corpus = GenerateSyntheticEntries(50, corpus_rng);
  EvaluateProfile(&profile, PropertyContext(corpus, PropertyKind::kKld));
  for (double v : profile.values()) EXPECT_EQ(v, 0.0);
}

TEST(EvaluateProfileTest, MatchesDirectEvaluationAndIsDeterministic) {
  Rng workload(11);
  auto profile = GenerateWorkload(12, 2000, 1.3, 3, workload);
  Rng binding(12);
  BindDataset(&profile, 1500, binding);
  Rng corpus_rng(13);
  const auto corpus = GenerateSyntheticEntries(1500, corpus_rng);
  for (PropertyKind kind : {PropertyKind::kKld, PropertyKind::kMi}) {
    const PropertyContext ctx(corpus, kind);
    auto serial = profile;
    EvaluateProfile(&profile, ctx, true);
    EvaluateProfile(&serial, ctx, false);
    ASSERT_EQ(profile.values().size(), serial.values().size());
    std::vector<RoleId> members;
    for (std::size_t k = 0; k < profile.values().size(); ++k) {
      EXPECT_EQ(profile.values()[k], serial.values()[k]);
      EXPECT_EQ(profile.empty_flags()[k], serial.empty_flags()[k]);
      profile.lattice().Unrank(k, &members);
      const auto ids = RoleDataset(profile, members);
      if (ids.empty()) {
        EXPECT_TRUE(profile.empty_flags()[k]);
      } else {
        EXPECT_NEAR(profile.values()[k], ctx.Value(ids), 1e-12);
      }
    }
  }
}

TEST(EvaluateProfileTest, UnboundIsStateError) {
  auto profile = Profile(2, {{RoleSet{0}, 1}});
  const auto corpus = std::vector<CheckinEntry>{{"u", 0, 1, 1}};
  try {
    EvaluateProfile(&profile, PropertyContext(corpus, PropertyKind::kKld));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kState);
  }
  const RoleId r0[] = {0};
  EXPECT_THROW(profile.Value(r0), Error);
}

}  // namespace
}  // namespace rspap
