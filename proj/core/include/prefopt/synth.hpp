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
#include <string>
#include <vector>

#include "prefopt/data_model.hpp"
#include "prefopt/policy.hpp"
#include "prefopt/rng.hpp"

namespace prefopt {

enum class LabelMode { kDeterministic, kBradleyTerry };

const char* to_string(LabelMode m) noexcept;
LabelMode parse_label_mode(const std::string& s);

/// Synthetic benchmark definition. Reference k mixes the two truth tables as
/// ((1 - gammas[k]) * good + gammas[k] * bad) / temperatures[k].
struct SynthConfig {
  std::size_t vocab_size = 16;
  std::size_t prompt_len = 4;
  std::size_t response_len_min = 6;
  std::size_t response_len_max = 24;
  std::vector<double> gammas;
  std::vector<double> temperatures;
  /// Optional; defaults to "ref0", "ref1", ...
  std::vector<std::string> ref_names;
  LabelMode label_mode = LabelMode::kBradleyTerry;
  /// Standard deviation of the N(0, s^2) truth-table logits.
  double logit_scale = 1.0;
  std::size_t num_pairs = 1000;
  std::uint64_t seed = 0;

  std::size_t num_refs() const noexcept { return gammas.size(); }
  /// Throws ConfigError on any violated invariant.
  void validate() const;
  std::vector<std::string> resolved_ref_names() const;
};

struct TruthTables {
  BigramPolicy good;
  BigramPolicy bad;
};

/// Two independent N(0, logit_scale^2) V x V tables from the seeded stream.
TruthTables make_truth_tables(std::size_t vocab_size, std::uint64_t seed, double logit_scale = 1.0);

/// ((1 - gamma) * good + gamma * bad) / temperature.
BigramPolicy make_reference(const BigramPolicy& good, const BigramPolicy& bad, double gamma, double temperature);

/// Draws `length` tokens autoregressively, conditioning the first on the last
/// prompt token (kBosToken for an empty prompt).
TokenSeq sample_response(const BigramPolicy& policy, const TokenSeq& prompt, std::size_t length, Rng& rng);

/// Maximum redraws when the good and bad samples coincide.
inline constexpr int kMaxResampleRetries = 8;

/// Samples one labelled pair and fills `ref_logprobs` by exact evaluation of
/// every reference. In Bradley-Terry mode the good-table sample is chosen with
/// probability sigmoid(r_good - r_bad), r = length-normalized log-prob under
/// the good table.
PreferenceExample sample_pair(const TruthTables& truth, const std::vector<BigramPolicy>& references,
                              const SynthConfig& cfg, Rng& rng, std::string id);

struct SynthBenchmark {
  TruthTables truth;
  std::vector<BigramPolicy> references;
  Dataset data;
};

/// Builds the truth tables, references, and `cfg.num_pairs` labelled pairs.
/// Example i draws from the stream derived from (cfg.seed, i).
SynthBenchmark generate(const SynthConfig& cfg);

}  // namespace prefopt
