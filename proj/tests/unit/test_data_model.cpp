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
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "prefopt/data_model.hpp"
#include "prefopt/errors.hpp"

namespace prefopt {
namespace {

PreferenceExample valid() {
  PreferenceExample ex;
  ex.id = "a";
  ex.prompt = {1, 2};
  ex.chosen = {3, 4, 5};
  ex.rejected = {6};
  ex.ref_logprobs = {{-3.0, -2.0}, {-6.0, -0.5}};
  return ex;
}

TEST(ValidateExample, AcceptsValid) { EXPECT_NO_THROW(validate_example(valid(), 7)); }

TEST(ValidateExample, RejectsBrokenExamples) {
  auto ex = valid();
  ex.chosen.clear();
  EXPECT_THROW(validate_example(ex), InvalidInput);

  ex = valid();
  ex.rejected = ex.chosen;
  EXPECT_THROW(validate_example(ex), InvalidInput);

  ex = valid();
  EXPECT_THROW(validate_example(ex, 6), InvalidInput);

  ex = valid();
  ex.ref_logprobs[1].chosen = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate_example(ex), InvalidInput);

  ex = valid();
  ex.ref_logprobs[0].rejected = 0.25;
  EXPECT_THROW(validate_example(ex), InvalidInput);
}

TEST(ValidateExample, EmptyPromptAllowed) {
  auto ex = valid();
  ex.prompt.clear();
  EXPECT_NO_THROW(validate_example(ex));
}

TEST(PreferenceExample, RefPairNormalizesByResponseLength) {
  const auto ex = valid();
  EXPECT_EQ(ex.ref_pair(0), (NormalizedLogProbPair{-1.0, -2.0}));
  EXPECT_EQ(ex.ref_pair(1, false), (NormalizedLogProbPair{-6.0, -0.5}));
}

TEST(NormalizeLogprob, Basics) {
  EXPECT_EQ(normalize_logprob(-6.0, 3), -2.0);
  EXPECT_THROW(normalize_logprob(-1.0, 0), InvalidInput);
  EXPECT_THROW(normalize_logprob(std::nan(""), 2), InvalidInput);
}

TEST(Dataset, RefIndexAndVocab) {
  Dataset d{{"x", "y"}, {valid()}, 0};
  EXPECT_EQ(d.ref_index("y"), 1u);
  EXPECT_THROW(d.ref_index("z"), InvalidInput);
  EXPECT_EQ(infer_vocab_size(d.examples), 7u);
  EXPECT_EQ(infer_vocab_size({}), 0u);
}

TEST(WeightVector, Factories) {
  EXPECT_EQ(WeightVector::uniform(1).values()[0], 1.0);
  const auto u4 = WeightVector::uniform(4);
  for (double a : u4.values()) EXPECT_EQ(a, 0.25);
  const auto u7 = WeightVector::uniform(7);
  for (double a : u7.values()) EXPECT_DOUBLE_EQ(a, 1.0 / 7.0);
  const auto e = WeightVector::basis(3, 2);
  EXPECT_TRUE(e.is_basis());
  EXPECT_EQ(e.basis_index(), 2u);
  EXPECT_FALSE(WeightVector::uniform(2).is_basis());
  EXPECT_TRUE(WeightVector::uniform(1).is_basis());
}

TEST(WeightVector, FromRawNormalizes) {
  const double raw[] = {0.2, 0.1};
  const auto w = WeightVector::from_raw(raw);
  EXPECT_DOUBLE_EQ(w[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(w[1], 1.0 / 3.0);
}

TEST(WeightVector, TinyRawSumFallsBackToUniform) {
  const double raw[] = {1e-14, 0.0, 0.0};
  EXPECT_EQ(WeightVector::from_raw(raw), WeightVector::uniform(3));
  const double zeros[] = {0.0, 0.0};
  EXPECT_EQ(WeightVector::from_raw(zeros), WeightVector::uniform(2));
}

TEST(WeightVector, RejectsInvalidRaw) {
  const double neg[] = {0.5, -0.1};
  EXPECT_THROW(WeightVector::from_raw(neg), InvalidInput);
  const double inf[] = {std::numeric_limits<double>::infinity()};
  EXPECT_THROW(WeightVector::from_raw(inf), InvalidInput);
  EXPECT_THROW(WeightVector::from_raw(std::span<const double>{}), InvalidInput);
  EXPECT_THROW(WeightVector::basis(2, 2), InvalidInput);
}

TEST(WeightVector, RandomRawLandsOnSimplex) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> raw(1 + t % 9);
    for (auto& x : raw) x = u(gen);
    EXPECT_TRUE(on_simplex(WeightVector::from_raw(raw).values()));
  }
}

TEST(OnSimplex, Tolerance) {
  const double ok[] = {0.5, 0.5 + 1e-10};
  const double off[] = {0.5, 0.5 + 1e-8};
  const double neg[] = {1.1, -0.1};
  EXPECT_TRUE(on_simplex(ok));
  EXPECT_FALSE(on_simplex(off));
  EXPECT_FALSE(on_simplex(neg));
}

}  // namespace
}  // namespace prefopt
