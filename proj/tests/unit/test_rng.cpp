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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "prefopt/rng.hpp"

namespace prefopt {
namespace {

TEST(Rng, EngineIsStandardMt19937_64) {
  // The standard pins the 10000th output of a default-seeded mt19937_64.
  Rng r(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = r.next_u64();
  EXPECT_EQ(x, 9981545732273789042ull);
}

TEST(Rng, UniformUsesTop53Bits) {
  std::mt19937_64 ref(42);
  Rng r(42);
  for (int i = 0; i < 100; ++i) {
    const double want = static_cast<double>(ref() >> 11) / 9007199254740992.0;
    EXPECT_EQ(r.uniform(), want);
  }
}

TEST(Rng, UniformIndexInRangeAndCoversAll) {
  Rng r(1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_THROW(r.uniform_index(0), std::invalid_argument);
}

TEST(Rng, NormalMoments) {
  Rng r(2);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Rng, GammaAndBetaMeans) {
  Rng r(3);
  for (double shape : {0.5, 1.0, 5.0, 30.0}) {
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += r.gamma(shape);
    EXPECT_NEAR(s / n / shape, 1.0, 0.02) << "shape " << shape;
  }
  for (auto [a, b] : {std::pair{5.0, 5.0}, std::pair{9.0, 1.0}, std::pair{0.7, 2.0}}) {
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = r.beta(a, b);
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 1.0);
      s += x;
    }
    EXPECT_NEAR(s / n, a / (a + b), 0.005);
  }
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = Rng::stream(9, streams::id(streams::kSplit));
  Rng b = Rng::stream(9, streams::id(streams::kSplit));
  EXPECT_EQ(a.next_u64(), b.next_u64());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t tag = 1; tag <= 7; ++tag) {
    for (std::uint64_t idx = 0; idx < 4; ++idx) firsts.insert(Rng::stream(9, streams::id(tag, idx)).next_u64());
  }
  EXPECT_EQ(firsts.size(), 28u);
}

}  // namespace
}  // namespace prefopt
