// Copyright 2026 The prefopt Authors. All Rights Reserved.
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

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

// Brute-force Kendall statistics written independently of eval_stats: integer
// S = concordant - discordant and Heap's-algorithm enumeration. Under a
// permutation of y the tie structure is unchanged, so tau_b* >= tau_b exactly
// when S* >= S; the comparison needs no floating-point slack.
namespace prefopt::testing {

inline long kendall_s(const std::vector<double>& x, const std::vector<double>& y) {
  long s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx * dy > 0) ++s;
      if (dx * dy < 0) --s;
    }
  }
  return s;
}

inline double kendall_tau_b_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  long n0 = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++n0;
      if (x[i] == x[j]) ++tx;
      if (y[i] == y[j]) ++ty;
    }
  }
  return static_cast<double>(kendall_s(x, y)) /
         std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
}

struct PermutationCount {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  double p() const { return static_cast<double>(hits) / static_cast<double>(total); }
};

/// P(S* >= S_obs) over all n! reorderings of y (Heap's algorithm, iterative).
inline PermutationCount kendall_exact_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const long s_obs = kendall_s(x, y);
  std::vector<double> yy = y;
  const std::size_t n = yy.size();
  std::vector<std::size_t> c(n, 0);
  PermutationCount out;
  auto visit = [&] {
    ++out.total;
    if (kendall_s(x, yy) >= s_obs) ++out.hits;
  };
  visit();
  std::size_t i = 1;
  while (i < n) {
    if (c[i] < i) {
      std::swap(yy[i % 2 == 0 ? 0 : c[i]], yy[i]);
      visit();
      ++c[i];
      i = 1;
    } else {
      c[i] = 0;
      ++i;
    }
  }
  return out;
}

}  // namespace prefopt::testing
