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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "prefopt/data_model.hpp"

namespace prefopt {

// JSONL record layout, one object per line:
//   {"id": str, "prompt": [int], "chosen": [int], "rejected": [int],
//    "ref_logprobs": {"<ref>": {"chosen": float, "rejected": float}, ...}}
// Log-probabilities are summed nats. The reference order of the dataset is the
// key order of the first record.

/// Parses a JSONL stream. Blank lines are skipped.
/// Throws ParseError (with 1-based line) on malformed lines and SchemaError
/// when a record's reference set differs from the first record's.
Dataset read_jsonl(std::istream& in);
Dataset load_jsonl(const std::filesystem::path& path);

/// Writes records in dataset order with fixed key order.
void write_jsonl(std::ostream& out, const Dataset& data);
void save_jsonl(const std::filesystem::path& path, const Dataset& data);

inline constexpr std::size_t kNoLengthLimit = std::numeric_limits<std::size_t>::max();

struct FilterConfig {
  double prompt_pctl = 2.5;
  double response_pctl = 2.5;
  /// Exclusive bound on prompt+response length; kNoLengthLimit disables it.
  std::size_t max_total_len = 1024;
};

/// Length thresholds resolved from a population. An example survives when its
/// prompt length > `min_prompt_exclusive`, both response lengths >
/// `min_response_exclusive`, and both prompt+response totals < `max_total_len`.
struct FilterThresholds {
  std::size_t min_prompt_exclusive = 0;
  std::size_t min_response_exclusive = 0;
  std::size_t max_total_len = kNoLengthLimit;
  bool prompt_active = false;
  bool response_active = false;
};

/// 1-based nearest rank ceil(pctl/100 * n) among n sorted values. 0 means the
/// percentile selects nothing (pctl = 0), so no lower threshold applies.
/// Requires 0 <= pctl <= 100.
std::size_t nearest_rank_index(std::size_t n, double pctl);

/// Computes thresholds over the input collection. Response lengths pool the
/// chosen and rejected lengths of every example.
FilterThresholds compute_thresholds(std::span<const PreferenceExample> examples, const FilterConfig& cfg);
std::vector<PreferenceExample> apply_thresholds(std::span<const PreferenceExample> examples,
                                                const FilterThresholds& t);
/// Single-pass filter: thresholds from `examples`, then applied to them.
std::vector<PreferenceExample> apply_filters(std::span<const PreferenceExample> examples, const FilterConfig& cfg);

struct SplitSpec {
  std::size_t train_n = 0;
  std::size_t val_n = 0;
  std::size_t test_n = 0;
  std::uint64_t seed = 0;
};

struct Splits {
  std::vector<PreferenceExample> train;
  std::vector<PreferenceExample> val;
  std::vector<PreferenceExample> test;
};

/// Seeded Fisher-Yates permutation of the indices, then contiguous slices.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);
Splits split(std::span<const PreferenceExample> examples, const SplitSpec& spec);

}  // namespace prefopt
