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

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/ingest.hpp"

namespace prefopt {
namespace {

using testing::random_examples;

const char* kTwoRecords =
    R"({"id":"a","prompt":[1,2],"chosen":[3],"rejected":[4,5],"ref_logprobs":{"m1":{"chosen":-1.5,"rejected":-2.0},"m2":{"chosen":-0.5,"rejected":-3.0}}})"
    "\n"
    R"({"id":"b","prompt":[],"chosen":[6,7],"rejected":[1],"ref_logprobs":{"m2":{"chosen":-4.0,"rejected":-1.0},"m1":{"chosen":-2.0,"rejected":-0.25}}})"
    "\n";

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_jsonl(in);
}

TEST(ReadJsonl, EmptyInput) {
  const Dataset d = parse("");
  EXPECT_TRUE(d.empty());
  EXPECT_TRUE(d.ref_names.empty());
}

TEST(ReadJsonl, ParsesRecordsInOrder) {
  const Dataset d = parse(kTwoRecords);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.ref_names, (std::vector<std::string>{"m1", "m2"}));
  EXPECT_EQ(d.examples[0].id, "a");
  EXPECT_EQ(d.examples[1].prompt, TokenSeq{});
  // Reference order follows the first record, not each record's key order.
  EXPECT_EQ(d.examples[1].ref_logprobs[0], (RefLogProb{-2.0, -0.25}));
  EXPECT_EQ(d.examples[1].ref_logprobs[1], (RefLogProb{-4.0, -1.0}));
}

TEST(ReadJsonl, SkipsBlankLines) {
  EXPECT_EQ(parse(std::string("\n") + kTwoRecords + "\n\n").size(), 2u);
}

TEST(ReadJsonl, MissingReferenceNamesRecordTwo) {
  const std::string text =
      R"({"id":"a","prompt":[1],"chosen":[2],"rejected":[3],"ref_logprobs":{"m1":{"chosen":-1,"rejected":-2},"m2":{"chosen":-1,"rejected":-2}}})"
      "\n"
      R"({"id":"b","prompt":[1],"chosen":[2],"rejected":[3],"ref_logprobs":{"m1":{"chosen":-1,"rejected":-2}}})"
      "\n";
  try {
    parse(text);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.record(), 2u);
  }
}

TEST(ReadJsonl, RenamedReferenceIsSchemaError) {
  const std::string text =
      R"({"id":"a","prompt":[1],"chosen":[2],"rejected":[3],"ref_logprobs":{"m1":{"chosen":-1,"rejected":-2}}})"
      "\n"
      R"({"id":"b","prompt":[1],"chosen":[2],"rejected":[3],"ref_logprobs":{"m9":{"chosen":-1,"rejected":-2}}})"
      "\n";
  EXPECT_THROW(parse(text), SchemaError);
}

TEST(ReadJsonl, MalformedLineReportsLineNumber) {
  const std::string text = std::string(kTwoRecords) + "{not json\n";
  try {
    parse(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ReadJsonl, InvalidRecordsAreParseErrors) {
  const char* bad[] = {
      R"({"id":"a","prompt":[1],"chosen":[],"rejected":[3],"ref_logprobs":{"m":{"chosen":-1,"rejected":-2}}})",
      R"({"id":"a","prompt":[1],"chosen":[3],"rejected":[3],"ref_logprobs":{"m":{"chosen":-1,"rejected":-2}}})",
      R"({"id":"a","prompt":[1],"chosen":[2],"rejected":[3],"ref_logprobs":{"m":{"chosen":0.5,"rejected":-2}}})",
      R"({"id":"a","prompt":[1],"chosen":[2],"rejected":[-3],"ref_logprobs":{"m":{"chosen":-1,"rejected":-2}}})",
      R"({"id":"a","prompt":[1],"chosen":[2],"rejected":[3],"ref_logprobs":{"m":{"chosen":-1,"rejected":-2}},"extra":1})",
      R"({"prompt":[1],"chosen":[2],"rejected":[3],"ref_logprobs":{"m":{"chosen":-1,"rejected":-2}}})",
      R"([1,2,3])",
  };
  for (const char* line : bad) {
    SCOPED_TRACE(line);
    EXPECT_THROW(parse(std::string(line) + "\n"), ParseError);
  }
}

TEST(WriteJsonl, RoundTripsExactly) {
  std::mt19937_64 gen(5);
  Dataset d{{"alpha", "beta", "gamma"}, random_examples(gen, 20, 3), 0};
  std::ostringstream out;
  write_jsonl(out, d);
  const Dataset back = parse(out.str());
  EXPECT_EQ(back.ref_names, d.ref_names);
  EXPECT_EQ(back.examples, d.examples);
  std::ostringstream again;
  write_jsonl(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(LoadJsonl, MissingFile) {
  EXPECT_THROW(load_jsonl("/nonexistent/prefopt/data.jsonl"), InvalidInput);
}

TEST(NearestRank, HandValues) {
  EXPECT_EQ(nearest_rank_index(100, 2.5), 3u);
  EXPECT_EQ(nearest_rank_index(100, 0.0), 0u);
  EXPECT_EQ(nearest_rank_index(100, 100.0), 100u);
  EXPECT_EQ(nearest_rank_index(40, 2.5), 1u);
  EXPECT_EQ(nearest_rank_index(41, 2.5), 2u);
  EXPECT_EQ(nearest_rank_index(7, 50.0), 4u);
  EXPECT_THROW(nearest_rank_index(10, 101.0), InvalidInput);
}

PreferenceExample with_lengths(std::size_t prompt, std::size_t chosen, std::size_t rejected, std::string id) {
  PreferenceExample ex;
  ex.id = std::move(id);
  ex.prompt.assign(prompt, 1);
  ex.chosen.assign(chosen, 2);
  ex.rejected.assign(rejected, 3);
  ex.ref_logprobs = {{-1.0, -1.0}};
  return ex;
}

TEST(ApplyFilters, PromptPercentileOneToHundred) {
  std::vector<PreferenceExample> xs;
  for (std::size_t len = 1; len <= 100; ++len) xs.push_back(with_lengths(len, 5, 5, std::to_string(len)));
  const FilterConfig cfg{2.5, 0.0, kNoLengthLimit};
  const auto t = compute_thresholds(xs, cfg);
  EXPECT_TRUE(t.prompt_active);
  EXPECT_EQ(t.min_prompt_exclusive, 3u);
  const auto kept = apply_filters(xs, cfg);
  ASSERT_EQ(kept.size(), 97u);
  EXPECT_EQ(kept.front().prompt.size(), 4u);
}

TEST(ApplyFilters, ConstantLengthsRemoveEverything) {
  std::vector<PreferenceExample> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(with_lengths(4, 6, 7, std::to_string(i)));
  EXPECT_TRUE(apply_filters(xs, FilterConfig{}).empty());
}

TEST(ApplyFilters, NoOpConfigKeepsInput) {
  std::mt19937_64 gen(6);
  const auto xs = random_examples(gen, 60, 2);
  EXPECT_EQ(apply_filters(xs, FilterConfig{0.0, 0.0, kNoLengthLimit}), xs);
}

TEST(ApplyFilters, ResponsePercentilePoolsBothResponses) {
  // Pooled response lengths {1,2,...,20} x 2 responses; rank ceil(0.1*40)=4 -> length 2.
  std::vector<PreferenceExample> xs;
  for (std::size_t i = 1; i <= 20; ++i) xs.push_back(with_lengths(3, i, 21 - i, std::to_string(i)));
  const auto t = compute_thresholds(xs, FilterConfig{0.0, 10.0, kNoLengthLimit});
  EXPECT_EQ(t.min_response_exclusive, 2u);
  for (const auto& ex : apply_thresholds(xs, t)) {
    EXPECT_GT(ex.chosen.size(), 2u);
    EXPECT_GT(ex.rejected.size(), 2u);
  }
}

TEST(ApplyFilters, TotalLengthBoundIsExclusive) {
  const std::vector<PreferenceExample> xs{with_lengths(5, 5, 4, "a"), with_lengths(5, 4, 4, "b"),
                                          with_lengths(2, 3, 8, "c")};
  const auto kept = apply_filters(xs, FilterConfig{0.0, 0.0, 10});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].id, "b");
}

TEST(ApplyFilters, FrozenThresholdsSecondPassIsIdentity) {
  std::mt19937_64 gen(7);
  const auto xs = random_examples(gen, 300, 2);
  const auto t = compute_thresholds(xs, FilterConfig{});
  const auto once = apply_thresholds(xs, t);
  EXPECT_EQ(apply_thresholds(once, t), once);
}

// The split permutation re-derived from the documented recipe: mt19937_64
// seeded with seed ^ (1 << 40), unbiased rejection draw, Fisher-Yates from the
// back.
std::vector<std::size_t> reference_permutation(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed ^ (std::uint64_t{1} << 40));
  auto draw = [&](std::uint64_t m) {
    const std::uint64_t max = ~std::uint64_t{0};
    const std::uint64_t limit = max - max % m;
    std::uint64_t x;
    do x = eng();
    while (x >= limit);
    return x % m;
  };
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[draw(i)]);
  return idx;
}

TEST(Split, PermutationMatchesPinnedRecipe) {
  for (std::uint64_t seed : {0ull, 1ull, 12345ull}) {
    EXPECT_EQ(shuffled_indices(37, seed), reference_permutation(37, seed));
  }
  EXPECT_NE(shuffled_indices(10, 0), shuffled_indices(10, 1));
}

TEST(Split, DisjointSizesAndDeterministic) {
  std::mt19937_64 gen(8);
  const auto xs = random_examples(gen, 100, 2);
  const SplitSpec spec{50, 20, 10, 3};
  const Splits a = split(xs, spec);
  const Splits b = split(xs, spec);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  ASSERT_EQ(a.train.size(), 50u);
  ASSERT_EQ(a.val.size(), 20u);
  ASSERT_EQ(a.test.size(), 10u);
  std::set<std::string> ids;
  for (const auto* part : {&a.train, &a.val, &a.test}) {
    for (const auto& ex : *part) ids.insert(ex.id);
  }
  EXPECT_EQ(ids.size(), 80u);
}

TEST(Split, TrainOnlyIsPermutedFullSet) {
  std::mt19937_64 gen(9);
  const auto xs = random_examples(gen, 30, 1);
  const Splits s = split(xs, {30, 0, 0, 4});
  const auto idx = shuffled_indices(30, 4);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(s.train[i], xs[idx[i]]);
}

TEST(Split, InfeasibleSizes) {
  std::mt19937_64 gen(10);
  const auto xs = random_examples(gen, 10, 1);
  EXPECT_THROW(split(xs, {8, 2, 1, 0}), InvalidInput);
}

}  // namespace
}  // namespace prefopt
