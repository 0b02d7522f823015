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
#include <random>

#include "fd_oracle.hpp"
#include "fixtures.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/policy.hpp"

namespace prefopt {
namespace {

using testing::central_difference;
using testing::random_tokens;
using testing::relative_error;

BigramPolicy random_bigram(std::mt19937_64& gen, std::size_t v, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> logits(v * v);
  for (auto& x : logits) x = nd(gen);
  return BigramPolicy(v, logits);
}

TEST(BigramPolicy, RejectsBadTables) {
  EXPECT_THROW(BigramPolicy(2, {0.0, 1.0, 2.0}), InvalidInput);
  EXPECT_THROW(BigramPolicy(1, {std::nan("")}), InvalidInput);
  EXPECT_THROW(BigramPolicy(0, {}), InvalidInput);
}

TEST(BigramPolicy, SoftmaxRowsSumToOne) {
  std::mt19937_64 gen(30);
  const auto p = random_bigram(gen, 9, 5.0);
  for (TokenId r = 0; r < 9; ++r) {
    const auto row = p.softmax_row(r);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(SeqLogprob, UniformRows) {
  const BigramPolicy p(2);
  EXPECT_NEAR(seq_logprob(p, {0}, {1, 0, 1}), -2.0794415416798359, 1e-15);
}

TEST(SeqLogprob, SaturatedRow) {
  // log softmax((0, 20))[1] = -log(1 + e^-20), 30-digit evaluation.
  const BigramPolicy p(2, {0.0, 20.0, 0.0, 0.0});
  EXPECT_NEAR(seq_logprob(p, {0}, {1}), -2.0611536203143807e-9, 1e-22);
}

TEST(SeqLogprob, EmptyPromptConditionsOnBos) {
  std::mt19937_64 gen(31);
  const auto p = random_bigram(gen, 5);
  EXPECT_DOUBLE_EQ(seq_logprob(p, {}, {3, 2}), seq_logprob(p, {kBosToken}, {3, 2}));
}

TEST(SeqLogprob, ChainsOverConcatenation) {
  std::mt19937_64 gen(32);
  const auto p = random_bigram(gen, 6);
  for (int t = 0; t < 50; ++t) {
    const TokenSeq x = random_tokens(gen, 6, 0, 3);
    const TokenSeq a = random_tokens(gen, 6, 1, 5);
    const TokenSeq b = random_tokens(gen, 6, 1, 5);
    TokenSeq ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    TokenSeq xa = x;
    xa.insert(xa.end(), a.begin(), a.end());
    EXPECT_NEAR(seq_logprob(p, x, ab), seq_logprob(p, x, a) + seq_logprob(p, xa, b), 1e-12);
  }
}

TEST(SeqLogprob, NonPositiveAndValidated) {
  std::mt19937_64 gen(33);
  const auto p = random_bigram(gen, 4, 3.0);
  for (int t = 0; t < 100; ++t) EXPECT_LE(seq_logprob(p, random_tokens(gen, 4, 0, 3), random_tokens(gen, 4, 1, 8)), 0.0);
  EXPECT_THROW(seq_logprob(p, {0}, {}), InvalidInput);
  EXPECT_THROW(seq_logprob(p, {0}, {4}), InvalidInput);
}

TEST(LogprobGrad, RowsSumToZeroAndUnvisitedRowsAreZero) {
  std::mt19937_64 gen(34);
  const auto p = random_bigram(gen, 7);
  const PolicyGrad g = logprob_grad(p, {2}, {5, 5, 1});
  for (TokenId r = 0; r < 7; ++r) {
    double s = 0.0;
    for (TokenId c = 0; c < 7; ++c) s += g.at(r, c);
    EXPECT_NEAR(s, 0.0, 1e-14);
    if (r != 2 && r != 5) {
      for (TokenId c = 0; c < 7; ++c) EXPECT_EQ(g.at(r, c), 0.0);
    }
  }
}

TEST(LogprobGrad, MatchesFiniteDifferences) {
  std::mt19937_64 gen(35);
  const std::size_t v = 5;
  for (int t = 0; t < 30; ++t) {
    const auto p = random_bigram(gen, v, 2.0);
    const TokenSeq x = random_tokens(gen, v, 0, 3);
    const TokenSeq y = random_tokens(gen, v, 1, 8);
    const PolicyGrad g = logprob_grad(p, x, y);
    std::vector<double> logits(p.logits().begin(), p.logits().end());
    const auto numeric = central_difference(
        [&](std::span<const double> l) { return seq_logprob(BigramPolicy(v, {l.begin(), l.end()}), x, y); }, logits,
        1e-5);
    EXPECT_LT(relative_error(g.d_logits, numeric), 1e-5);
  }
}

TEST(LogprobGrad, AccumulateScales) {
  std::mt19937_64 gen(36);
  const auto p = random_bigram(gen, 4);
  PolicyGrad acc(4);
  accumulate_logprob_grad(p, {1}, {2, 3}, -2.5, acc);
  const PolicyGrad g = logprob_grad(p, {1}, {2, 3});
  for (std::size_t i = 0; i < g.d_logits.size(); ++i) EXPECT_DOUBLE_EQ(acc.d_logits[i], -2.5 * g.d_logits[i]);
}

TEST(PolicyScorer, AgreesWithDirectEvaluation) {
  std::mt19937_64 gen(37);
  const auto p = random_bigram(gen, 8, 3.0);
  const PolicyScorer s(p);
  for (int t = 0; t < 50; ++t) {
    const TokenSeq x = random_tokens(gen, 8, 0, 3);
    const TokenSeq y = random_tokens(gen, 8, 1, 10);
    EXPECT_NEAR(s.seq_logprob(x, y), seq_logprob(p, x, y), 1e-12);
  }
}

TEST(RandomPolicy, ZeroScaleAndDeterminism) {
  EXPECT_EQ(random_policy(4, 0.0, 9), BigramPolicy(4));
  EXPECT_EQ(random_policy(4, 1.0, 9), random_policy(4, 1.0, 9));
  EXPECT_NE(random_policy(4, 1.0, 9), random_policy(4, 1.0, 10));
  EXPECT_THROW(random_policy(4, -1.0, 0), InvalidInput);
}

TEST(Checkpoint, RoundTripIsExact) {
  std::mt19937_64 gen(38);
  const auto p = random_bigram(gen, 6, 7.0);
  testing::TempDir dir("ckpt");
  save_checkpoint(dir / "p.json", p);
  const BigramPolicy q = load_checkpoint(dir / "p.json");
  EXPECT_EQ(p, q);
  EXPECT_EQ(p.checksum(), q.checksum());
}

TEST(Checkpoint, RejectsWrongFormat) {
  testing::TempDir dir("ckpt-bad");
  testing::write_text(dir / "p.json", R"({"format":"other","vocab_size":1,"logits":[[0]]})");
  EXPECT_THROW(load_checkpoint(dir / "p.json"), InvalidInput);
}

TEST(Checksum, SensitiveToEveryLogit) {
  BigramPolicy p(3);
  const auto base = p.checksum();
  p.mutable_logits()[8] = 1e-300;
  EXPECT_NE(p.checksum(), base);
}

}  // namespace
}  // namespace prefopt
