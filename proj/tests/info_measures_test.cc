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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rspap/error.h"
#include "rspap/random.h"

namespace rspap {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kState;
}

std::vector<double> RandomPmf(int size, Rng& rng, double zero_fraction) {
  std::vector<double> p(size);
  double total = 0.0;
  for (double& v : p) {
    v = rng.Uniform01() < zero_fraction ? 0.0 : rng.Uniform01();
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    total = 1.0;
  }
  for (double& v : p) v /= total;
  return p;
}

TEST(EntropyTest, Examples) {
  const std::vector<double> uniform = {0.25, 0.25, 0.25, 0.25};
  EXPECT_NEAR(Entropy(uniform), 2.0, 1e-12);
  EXPECT_EQ(Entropy(std::vector<double>{0.0, 1.0, 0.0}), 0.0);
  const double expected = -(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75));
  EXPECT_NEAR(Entropy(std::vector<double>{0.25, 0.75}), expected, 1e-12);
  EXPECT_NEAR(expected, 0.8113, 1e-4);
}

TEST(EntropyTest, RejectsNonPmf) {
  EXPECT_EQ(CodeOf([] { Entropy(std::vector<double>{-0.1, 1.1}); }), ErrorCode::kDomain);
  EXPECT_EQ(CodeOf([] { Entropy(std::vector<double>{0.5, 0.6}); }), ErrorCode::kDomain);
}

TEST(KlDivergenceTest, Examples) {
  const std::vector<double> half = {0.5, 0.5};
  EXPECT_EQ(KlDivergence(half, half), 0.0);
  const double expected = 0.5 * std::log2(0.5 / 0.25) + 0.5 * std::log2(0.5 / 0.75);
  EXPECT_NEAR(KlDivergence(half, std::vector<double>{0.25, 0.75}), expected, 1e-12);
  EXPECT_NEAR(expected, 0.2075, 1e-4);
  EXPECT_NEAR(KlDivergence(std::vector<double>{1.0, 0.0}, half), 1.0, 1e-12);
}

TEST(KlDivergenceTest, Errors) {
  EXPECT_EQ(CodeOf([] {
              KlDivergence(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0});
            }),
            ErrorCode::kSupport);
  EXPECT_EQ(CodeOf([] {
              KlDivergence(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.3});
            }),
            ErrorCode::kDomain);
  EXPECT_THROW(KlDivergence(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), Error);
}

TEST(MutualInformationTest, Examples) {
  const std::vector<double> product = {0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4};
  EXPECT_NEAR(MutualInformation(product, 2, 2), 0.0, 1e-12);
  EXPECT_NEAR(MutualInformation(std::vector<double>{0.5, 0, 0, 0.5}, 2, 2), 1.0, 1e-12);
  const double expected = 2 * 0.4 * std::log2(0.4 / 0.25) + 2 * 0.1 * std::log2(0.1 / 0.25);
  EXPECT_NEAR(MutualInformation(std::vector<double>{0.4, 0.1, 0.1, 0.4}, 2, 2), expected, 1e-12);
  EXPECT_NEAR(expected, 0.2781, 1e-4);
}

// Identities checked on random pmfs, including sparse ones.
TEST(InfoIdentitiesTest, RandomPmfs) {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const int rows = 1 + static_cast<int>(rng.UniformIndex(15));
    const int cols = 1 + static_cast<int>(rng.UniformIndex(4));
    const double zeros = trial % 2 ? 0.3 : 0.0;
    const auto p = RandomPmf(rows * cols, rng, zeros);
    const auto q = RandomPmf(rows * cols, rng, 0.0);
    EXPECT_GE(KlDivergence(p, q), -1e-9);
    EXPECT_NEAR(KlDivergence(p, p), 0.0, 1e-9);

    std::vector<double> px(rows, 0.0), py(cols, 0.0), product(rows * cols), transposed(rows * cols);
    for (int x = 0; x < rows; ++x) {
      for (int y = 0; y < cols; ++y) {
        px[x] += p[x * cols + y];
        py[y] += p[x * cols + y];
        transposed[y * rows + x] = p[x * cols + y];
      }
    }
    for (int x = 0; x < rows; ++x) {
      for (int y = 0; y < cols; ++y) product[x * cols + y] = px[x] * py[y];
    }
    const double mi = MutualInformation(p, rows, cols);
    EXPECT_NEAR(mi, KlDivergence(p, product), 1e-9);
    EXPECT_NEAR(mi, MutualInformation(transposed, cols, rows), 1e-9);
    EXPECT_GE(mi, -1e-9);
    EXPECT_LE(mi, std::min(Entropy(px), Entropy(py)) + 1e-9);
  }
}

// Six entries: cells (1,1),(1,2),(2,1),(2,2),(1,1),(2,2).
std::vector<CheckinEntry> ToyCorpus() {
  return {{"a", 0, 1, 1}, {"a", 0, 1, 2}, {"a", 0, 2, 1},
          {"a", 0, 2, 2}, {"a", 0, 1, 1}, {"a", 0, 2, 2}};
}

TEST(PropertyContextTest, FullCorpusIsZero) {
  const auto corpus = ToyCorpus();
  const std::vector<std::int64_t> all = {0, 1, 2, 3, 4, 5};
  EXPECT_EQ(PropertyContext(corpus, PropertyKind::kKld).Value(all), 0.0);
  EXPECT_EQ(PropertyContext(corpus, PropertyKind::kMi).Value(all), 0.0);
}

TEST(PropertyContextTest, HandComputedSubsets) {
  const auto corpus = ToyCorpus();
  const PropertyContext kld(corpus, PropertyKind::kKld);
  // P_A = 1/2 on (1,1) and (2,2), where P_G = 1/3 each.
  EXPECT_NEAR(kld.Value(std::vector<std::int64_t>{0, 5}), std::log2(1.5), 1e-12);
  // P_A = point mass on (1,1).
  EXPECT_NEAR(kld.Value(std::vector<std::int64_t>{0, 4}), std::log2(3.0), 1e-12);

  const PropertyContext mi(corpus, PropertyKind::kMi);
  // P_G: 1/3, 1/6, 1/6, 1/3 on the 2x2 block with uniform marginals.
  const double mi_g = 2 * (1.0 / 3) * std::log2((1.0 / 3) / 0.25) +
                      2 * (1.0 / 6) * std::log2((1.0 / 6) / 0.25);
  EXPECT_NEAR(mi.global_mi(), mi_g, 1e-12);
  // Diagonal subset has MI = 1 bit.
  EXPECT_NEAR(mi.Value(std::vector<std::int64_t>{0, 5}), std::fabs(1.0 - mi_g), 1e-12);
  EXPECT_NEAR(mi.Value(std::vector<std::int64_t>{0}), mi_g, 1e-12);
}

TEST(PropertyContextTest, ErrorsAndDuplicates) {
  const auto corpus = ToyCorpus();
  const PropertyContext kld(corpus, PropertyKind::kKld);
  EXPECT_EQ(CodeOf([&] { kld.Value(std::vector<std::int64_t>{}); }), ErrorCode::kDegenerate);
  EXPECT_EQ(CodeOf([] { PropertyContext(std::vector<CheckinEntry>{}, PropertyKind::kKld); }),
            ErrorCode::kDegenerate);
  // Duplicates count twice: {0, 0, 5} has P_A = (2/3, 1/3) on (1,1), (2,2).
  const double expected = (2.0 / 3) * std::log2((2.0 / 3) / (1.0 / 3)) +
                          (1.0 / 3) * std::log2((1.0 / 3) / (1.0 / 3));
  EXPECT_NEAR(kld.Value(std::vector<std::int64_t>{0, 0, 5}), expected, 1e-12);
}

TEST(PropertyContextTest, SubsetsOfCorpusAreFinite) {
  Rng rng(4);
  const auto corpus = GenerateSyntheticEntries(3000, rng);
  for (PropertyKind kind : {PropertyKind::kKld, PropertyKind::kMi}) {
    const PropertyContext ctx(corpus, kind);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::int64_t> subset(1 + rng.UniformIndex(50));
      for (auto& id : subset) id = rng.UniformIndex(corpus.size());
      const double v = ctx.Value(subset);
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
    }
  }
}

TEST(PropertyKindTest, Names) {
  EXPECT_STREQ(PropertyKindName(PropertyKind::kKld), "KLD");
  EXPECT_STREQ(PropertyKindName(PropertyKind::kMi), "MI");
  EXPECT_EQ(ParsePropertyKind("mi").value(), PropertyKind::kMi);
  EXPECT_EQ(ParsePropertyKind("KLD").value(), PropertyKind::kKld);
  EXPECT_FALSE(ParsePropertyKind("JS").has_value());
}

TEST(MonotonicityCurveTest, FullFractionIsZero) {
  Rng corpus_rng(5);
  const auto corpus = GenerateSyntheticEntries(2000, corpus_rng);
  for (PropertyKind kind : {PropertyKind::kKld, PropertyKind::kMi}) {
    const PropertyContext ctx(corpus, kind);
    Rng rng(6);
    const std::vector<double> fractions = {0.5, 1.0};
    const auto curve = MonotonicityCurve(ctx, fractions, 3, rng);
    ASSERT_EQ(curve.size(), 2u);
    EXPECT_GT(curve[0], 0.0);
    EXPECT_EQ(curve[1], 0.0);
  }
}

TEST(MonotonicityCurveTest, RejectsBadArguments) {
  const auto corpus = ToyCorpus();
  const PropertyContext ctx(corpus, PropertyKind::kKld);
  Rng rng(1);
  EXPECT_THROW(MonotonicityCurve(ctx, std::vector<double>{1.0, 0.5}, 1, rng), Error);
  EXPECT_THROW(MonotonicityCurve(ctx, std::vector<double>{0.0, 0.5}, 1, rng), Error);
  EXPECT_THROW(MonotonicityCurve(ctx, std::vector<double>{0.5}, 0, rng), Error);
}

}  // namespace
}  // namespace rspap
