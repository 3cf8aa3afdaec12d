// Copyright 2026 The isingchaos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "isingchaos/errors.hpp"
#include "isingchaos/random.hpp"

namespace isingchaos::stats {

inline double median(std::vector<double> v) {
  if (v.empty()) throw InsufficientDataError("median of empty sample");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InsufficientDataError("mean of empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator); zero for a single value.
inline double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Bootstrap standard deviation of `statistic` over resamples of `sample`.
template <class Statistic>
double bootstrap_sd(std::span<const double> sample, Statistic&& statistic, std::size_t resamples,
                    std::uint64_t seed) {
  if (sample.empty()) throw InsufficientDataError("bootstrap of empty sample");
  Xoshiro256 rng(derive_key({salt::kBootstrap, seed}));
  std::vector<double> draws(resamples), buf(sample.size());
  for (auto& d : draws) {
    for (auto& b : buf) b = sample[uniform_index(rng, sample.size())];
    d = statistic(buf);
  }
  return stddev(draws);
}

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  // Standard errors; empty when the fit has no residual degrees of freedom.
  std::optional<double> intercept_se;
  std::optional<double> slope_se;
  std::vector<double> residuals;
};

// Ordinary least squares y = intercept + slope * x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("linear_fit: length mismatch");
  const std::size_t m = x.size();
  if (m < 2) throw InsufficientDataError("linear_fit needs at least two points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("linear_fit: abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    ssr += r * r;
  }
  if (m > 2) {
    const double s2 = ssr / static_cast<double>(m - 2);
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / static_cast<double>(m) + mx * mx / sxx));
  }
  return f;
}

// Pool-adjacent-violators fit of a non-increasing sequence (equal weights
// unless given).
inline std::vector<double> isotonic_decreasing(std::span<const double> y,
                                               std::span<const double> w = {}) {
  struct Block {
    double sum, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    blocks.push_back({y[i] * wi, wi, 1});
    while (blocks.size() > 1) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.weight >= b.sum / b.weight) break;
      a.sum += b.sum;
      a.weight += b.weight;
      a.count += b.count;
      blocks.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.sum / b.weight);
  return out;
}

}  // namespace isingchaos::stats
