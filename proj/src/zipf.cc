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

#include "rspap/zipf.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rspap/error.h"

namespace rspap {
namespace {

// log1p(x) / x with the removable singularity at 0 filled in.
double Log1pOverX(double x) {
  if (std::abs(x) > 1e-8) return std::log1p(x) / x;
  return 1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
}

// expm1(x) / x, likewise.
double Expm1OverX(double x) {
  if (std::abs(x) > 1e-8) return std::expm1(x) / x;
  return 1.0 + x * 0.5 * (1.0 + x / 3.0 * (1.0 + 0.25 * x));
}

}  // namespace

ZipfSampler::ZipfSampler(double n, double s, double tail_cap) : n_(n), s_(s) {
  if (!(n >= 1.0) || !std::isfinite(n) || n != std::floor(n)) {
    std::ostringstream msg;
    msg << "zipf: N must be a positive integer, got " << n;
    throw Error(ErrorCode::kParameter, msg.str());
  }
  if (!(s >= 1.0) || !std::isfinite(s)) {
    std::ostringstream msg;
    msg << "zipf: s must be >= 1, got " << s;
    throw Error(ErrorCode::kParameter, msg.str());
  }
  if (n <= kTableLimit) {
    mode_ = Mode::kTable;
    const auto count = static_cast<std::size_t>(n);
    cdf_.resize(count);
    double acc = 0.0;
    for (std::size_t k = 1; k <= count; ++k) {
      acc += std::pow(static_cast<double>(k), -s);
      cdf_[k - 1] = acc;
    }
  } else if (n <= tail_cap) {
    mode_ = Mode::kRejectionInversion;
    h_integral_x1_ = HIntegral(1.5) - 1.0;
    h_integral_n_ = HIntegral(n + 0.5);
    squeeze_ = 2.0 - HIntegralInverse(HIntegral(2.5) - H(2.0));
  } else {
    mode_ = Mode::kHeadTail;
    cdf_.resize(kHeadRanks);
    double acc = 0.0;
    for (int k = 1; k <= kHeadRanks; ++k) {
      acc += std::pow(static_cast<double>(k), -s);
      cdf_[k - 1] = acc;
    }
    head_mass_ = acc;
    tail_mass_ = PowerIntegral(kHeadRanks + 0.5, n + 0.5);
  }
}

double ZipfSampler::Sample(Rng& rng) const {
  switch (mode_) {
    case Mode::kTable: {
      const double u = rng.Uniform01() * cdf_.back();
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const auto k = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
      return static_cast<double>(k + 1);
    }
    case Mode::kRejectionInversion:
      return SampleRejectionInversion(rng);
    case Mode::kHeadTail:
      return SampleHeadTail(rng);
  }
  return 1.0;
}

double ZipfSampler::SampleRejectionInversion(Rng& rng) const {
  for (;;) {
    const double u = h_integral_n_ + rng.Uniform01() * (h_integral_x1_ - h_integral_n_);
    const double x = HIntegralInverse(u);
    double k = std::floor(x + 0.5);
    k = std::clamp(k, 1.0, n_);
    if (k - x <= squeeze_ || u >= HIntegral(k + 0.5) - H(k)) return k;
  }
}

double ZipfSampler::SampleHeadTail(Rng& rng) const {
  const double u = rng.Uniform01() * (head_mass_ + tail_mass_);
  if (u < head_mass_) {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto k = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
    return static_cast<double>(k + 1);
  }
  const double x = PowerIntegralInverse(kHeadRanks + 0.5, u - head_mass_);
  return std::clamp(std::floor(x + 0.5), static_cast<double>(kHeadRanks + 1), n_);
}

double ZipfSampler::H(double x) const { return std::exp(-s_ * std::log(x)); }

double ZipfSampler::HIntegral(double x) const {
  const double log_x = std::log(x);
  return Expm1OverX((1.0 - s_) * log_x) * log_x;
}

double ZipfSampler::HIntegralInverse(double x) const {
  double t = x * (1.0 - s_);
  if (t < -1.0) t = -1.0;
  return std::exp(Log1pOverX(t) * x);
}

double ZipfSampler::PowerIntegral(double a, double b) const {
  if (s_ == 1.0) return std::log(b / a);
  return (std::pow(a, 1.0 - s_) - std::pow(b, 1.0 - s_)) / (s_ - 1.0);
}

double ZipfSampler::PowerIntegralInverse(double a, double mass) const {
  if (s_ == 1.0) return a * std::exp(mass);
  const double base = std::pow(a, 1.0 - s_) - mass * (s_ - 1.0);
  if (base <= 0.0) return n_;
  return std::pow(base, 1.0 / (1.0 - s_));
}

}  // namespace rspap
