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

#ifndef RSPAP_RANDOM_H_
#define RSPAP_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace rspap {

// Seeded random stream. Wraps mt19937_64 and derives every variate with
// integer arithmetic only, so sequences are identical across standard
// library implementations (std::uniform_*_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent sub-stream for (seed, name). Changing how many draws one
  // stream consumes never perturbs another.
  static Rng Stream(std::uint64_t seed, std::string_view name);

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi].
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t UniformIndex(std::uint64_t bound);

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = UniformIndex(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace rspap

#endif  // RSPAP_RANDOM_H_
