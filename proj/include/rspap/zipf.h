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

#ifndef RSPAP_ZIPF_H_
#define RSPAP_ZIPF_H_

#include <cstdint>
#include <vector>

#include "rspap/random.h"

namespace rspap {

// Draws ranks in [1, N] with P(k) proportional to k^-s.
//
// N is a double because lattice levels such as C(150, 75) do not fit in 64
// bits. Three regimes are used:
//   N <= 2^20        cumulative table + binary search (exact),
//   N <= tail_cap    rejection-inversion (exact, W. Hormann and G. Derflinger),
//   N >  tail_cap    exact table over the first 2^16 ranks plus an
//                    inverse-CDF draw from the continuous x^-s density for
//                    the tail; no rejection loop.
// Ranks above 2^53 are returned rounded to the nearest representable double.
class ZipfSampler {
 public:
  static constexpr double kTableLimit = 1048576.0;  // 2^20
  static constexpr int kHeadRanks = 65536;

  // Throws kParameter unless N >= 1 is integral and s >= 1.
  ZipfSampler(double n, double s, double tail_cap = 1e9);

  double Sample(Rng& rng) const;

  double n() const { return n_; }
  double s() const { return s_; }

 private:
  enum class Mode { kTable, kRejectionInversion, kHeadTail };

  double SampleRejectionInversion(Rng& rng) const;
  double SampleHeadTail(Rng& rng) const;
  double H(double x) const;
  double HIntegral(double x) const;
  double HIntegralInverse(double x) const;
  // Integral of x^-s over [a, b].
  double PowerIntegral(double a, double b) const;
  double PowerIntegralInverse(double a, double mass) const;

  double n_;
  double s_;
  Mode mode_;
  std::vector<double> cdf_;  // table and head-tail modes
  double head_mass_ = 0.0;
  double tail_mass_ = 0.0;
  double h_integral_x1_ = 0.0;
  double h_integral_n_ = 0.0;
  double squeeze_ = 0.0;
};

}  // namespace rspap

#endif  // RSPAP_ZIPF_H_
