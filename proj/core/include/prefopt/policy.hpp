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
#include <span>
#include <vector>

#include "prefopt/data_model.hpp"

namespace prefopt {

/// Conditioning token for the first response token when the prompt is empty.
inline constexpr TokenId kBosToken = 0;

/// Autoregressive bigram policy: next-token distribution softmax(logits[prev]).
/// Logits are stored row-major, row = previous token.
class BigramPolicy {
 public:
  BigramPolicy() = default;
  /// All-zero logits (uniform next-token distribution).
  explicit BigramPolicy(std::size_t vocab_size);
  /// Throws InvalidInput unless logits.size() == V*V, V >= 1, all finite.
  BigramPolicy(std::size_t vocab_size, std::vector<double> logits);

  std::size_t vocab_size() const noexcept { return vocab_; }
  std::span<const double> logits() const noexcept { return logits_; }
  std::span<double> mutable_logits() noexcept { return logits_; }
  std::span<const double> row(TokenId prev) const { return {logits_.data() + std::size_t{prev} * vocab_, vocab_}; }
  double at(TokenId prev, TokenId next) const { return logits_[std::size_t{prev} * vocab_ + next]; }

  /// Next-token probabilities for one row.
  std::vector<double> softmax_row(TokenId prev) const;

  /// FNV-1a over the IEEE-754 bit patterns of V and the logits.
  std::uint64_t checksum() const noexcept;

  friend bool operator==(const BigramPolicy&, const BigramPolicy&) = default;

 private:
  std::size_t vocab_ = 0;
  std::vector<double> logits_;
};

/// Logits drawn i.i.d. N(0, scale^2) from the policy-init stream of `seed`.
/// scale == 0 gives the all-zero policy.
BigramPolicy random_policy(std::size_t vocab_size, double scale, std::uint64_t seed);

/// V x V gradient table with the same layout as BigramPolicy::logits().
struct PolicyGrad {
  std::size_t vocab_size = 0;
  std::vector<double> d_logits;

  PolicyGrad() = default;
  explicit PolicyGrad(std::size_t v) : vocab_size(v), d_logits(v * v, 0.0) {}

  double at(TokenId prev, TokenId next) const { return d_logits[std::size_t{prev} * vocab_size + next]; }
  double l2_norm() const noexcept;
};

/// log pi(response | prompt) in nats. Throws InvalidInput on an empty response
/// or an out-of-range token.
double seq_logprob(const BigramPolicy& policy, const TokenSeq& prompt, const TokenSeq& response);

/// d/d logits of seq_logprob: for every position, one-hot(next) minus the row
/// softmax, accumulated on the visited row.
PolicyGrad logprob_grad(const BigramPolicy& policy, const TokenSeq& prompt, const TokenSeq& response);

/// Adds `scale * logprob_grad(...)` into `grad`.
void accumulate_logprob_grad(const BigramPolicy& policy, const TokenSeq& prompt, const TokenSeq& response,
                             double scale, PolicyGrad& grad);

/// Caches every row's log-softmax so repeated sequence scoring is O(length).
/// Holds a copy of the table; it does not observe later policy updates.
class PolicyScorer {
 public:
  explicit PolicyScorer(const BigramPolicy& policy);

  double seq_logprob(const TokenSeq& prompt, const TokenSeq& response) const;
  /// Length-normalized (nats/token) log-probs of the chosen and rejected responses.
  NormalizedLogProbPair normalized_pair(const PreferenceExample& ex, bool length_normalized = true) const;

 private:
  std::size_t vocab_;
  std::vector<double> log_probs_;
};

/// JSON checkpoint: {"format": "prefopt.bigram.v1", "vocab_size": V, "logits": [[...], ...]}.
/// Doubles are written in shortest round-trip form, so save/load is exact.
void save_checkpoint(const std::filesystem::path& path, const BigramPolicy& policy);
BigramPolicy load_checkpoint(const std::filesystem::path& path);

}  // namespace prefopt
