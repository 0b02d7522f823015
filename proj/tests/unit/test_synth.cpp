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
#include <numeric>

#include "fixtures.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/eval_stats.hpp"
#include "prefopt/synth.hpp"
#include "prefopt/weighting.hpp"

namespace prefopt {
namespace {

using testing::five_reference_benchmark;

TEST(TruthTables, DeterministicAndShaped) {
  const auto a = make_truth_tables(2, 5);
  const auto b = make_truth_tables(2, 5);
  EXPECT_EQ(a.good, b.good);
  EXPECT_EQ(a.bad, b.bad);
  EXPECT_NE(a.good, a.bad);
  EXPECT_EQ(a.good.logits().size(), 4u);
  for (TokenId r = 0; r < 2; ++r) {
    const auto row = a.good.softmax_row(r);
    EXPECT_NEAR(row[0] + row[1], 1.0, 1e-12);
  }
  EXPECT_NE(make_truth_tables(2, 6).good, a.good);
}

TEST(MakeReference, Mixtures) {
  const auto t = make_truth_tables(4, 1);
  EXPECT_EQ(make_reference(t.good, t.bad, 0.0, 1.0), t.good);
  const auto sharp = make_reference(t.good, t.bad, 1.0, 0.25);
  const auto mid = make_reference(t.good, t.bad, 0.5, 1.0);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_DOUBLE_EQ(sharp.logits()[i], 4.0 * t.bad.logits()[i]);
    EXPECT_DOUBLE_EQ(mid.logits()[i], 0.5 * (t.good.logits()[i] + t.bad.logits()[i]));
  }
}

TEST(SynthConfig, Validation) {
  SynthConfig c = five_reference_benchmark(0, 10);
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.temperatures.pop_back();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.gammas[0] = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.response_len_min = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.temperatures[2] = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_EQ(c.resolved_ref_names(), (std::vector<std::string>{"ref0", "ref1", "ref2", "ref3", "ref4"}));
}

TEST(SamplePair, DeterministicModeChoosesGoodSample) {
  // Peaked tables: the good table emits token 0, the bad table token 5.
  const std::size_t v = 6;
  std::vector<double> good(v * v, 0.0), bad(v * v, 0.0);
  for (std::size_t r = 0; r < v; ++r) {
    good[r * v + 0] = 60.0;
    bad[r * v + 5] = 60.0;
  }
  const TruthTables t{BigramPolicy(v, good), BigramPolicy(v, bad)};
  SynthConfig c;
  c.vocab_size = v;
  c.gammas = {0.0, 1.0};
  c.temperatures = {1.0, 1.0};
  c.label_mode = LabelMode::kDeterministic;
  const std::vector<BigramPolicy> refs{t.good, t.bad};
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(i);
    const auto ex = sample_pair(t, refs, c, rng, "x");
    EXPECT_NO_THROW(validate_example(ex, v));
    EXPECT_EQ(ex.prompt.size(), c.prompt_len);
    EXPECT_EQ(ex.chosen, TokenSeq(ex.chosen.size(), 0));
    EXPECT_EQ(ex.rejected, TokenSeq(ex.rejected.size(), 5));
    EXPECT_GE(ex.chosen.size(), c.response_len_min);
    EXPECT_LE(ex.rejected.size(), c.response_len_max);
    EXPECT_EQ(ex.ref_logprobs[0].chosen, seq_logprob(t.good, ex.prompt, ex.chosen));
    EXPECT_EQ(ex.ref_logprobs[1].rejected, seq_logprob(t.bad, ex.prompt, ex.rejected));
  }
}

TEST(SamplePair, BradleyTerryWithFlatRewardIsFairCoin) {
  // A uniform good table gives every response the same reward, so p = 1/2.
  TruthTables t{BigramPolicy(6), make_truth_tables(6, 3).bad};
  SynthConfig c;
  c.vocab_size = 6;
  c.gammas = {0.0};
  c.temperatures = {1.0};
  const std::vector<BigramPolicy> refs{t.good};
  int same = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    SynthConfig det = c;
    det.label_mode = LabelMode::kDeterministic;
    Rng a(1000 + i), b(1000 + i);
    const auto bt = sample_pair(t, refs, c, a, "x");
    const auto d = sample_pair(t, refs, det, b, "x");
    if (bt.chosen == d.chosen) ++same;
  }
  EXPECT_NEAR(static_cast<double>(same) / n, 0.5, 0.03);
}

TEST(Generate, DeterministicAndValid) {
  const SynthConfig c = five_reference_benchmark(4, 300);
  const auto a = generate(c);
  const auto b = generate(c);
  EXPECT_EQ(a.data.examples, b.data.examples);
  EXPECT_EQ(a.data.size(), 300u);
  EXPECT_EQ(a.data.vocab_size, c.vocab_size);
  EXPECT_EQ(a.data.examples[17].id, "synth-17");
  for (const auto& ex : a.data.examples) EXPECT_NO_THROW(validate_example(ex, c.vocab_size));
}

TEST(Generate, PrefixStable) {
  // Example i draws from its own stream, so a longer run extends a shorter one.
  const auto small = generate(five_reference_benchmark(5, 50));
  const auto large = generate(five_reference_benchmark(5, 80));
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(small.data.examples[i], large.data.examples[i]);
}

// Temperature-1 reference accuracy is non-increasing in gamma, allowing one
// adjacent inversion per seed.
TEST(Generate, AccuracyOrderedByGamma) {
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto bench = generate(five_reference_benchmark(seed, 2000));
    std::vector<double> acc;
    for (std::size_t k = 0; k < 4; ++k) acc.push_back(reference_accuracy(bench.data.examples, k).accuracy);
    int inversions = 0;
    for (std::size_t k = 1; k < acc.size(); ++k) inversions += acc[k] > acc[k - 1];
    EXPECT_LE(inversions, 1) << "seed " << seed;
    EXPECT_GT(acc.front(), acc.back());
  }
}

TEST(Generate, OverconfidentArmHasLargestConfidence) {
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto bench = generate(five_reference_benchmark(seed, 2000));
    std::vector<double> conf(5, 0.0);
    for (const auto& ex : bench.data.examples) {
      for (std::size_t k = 0; k < 5; ++k) conf[k] += discriminative_confidence(ex, k);
    }
    for (std::size_t k = 0; k < 4; ++k) EXPECT_GT(conf[4], conf[k]) << "seed " << seed << " ref " << k;
  }
}

TEST(LabelMode, Names) {
  EXPECT_EQ(parse_label_mode(to_string(LabelMode::kBradleyTerry)), LabelMode::kBradleyTerry);
  EXPECT_EQ(parse_label_mode("deterministic"), LabelMode::kDeterministic);
  EXPECT_THROW(parse_label_mode("coin"), ConfigError);
}

}  // namespace
}  // namespace prefopt
