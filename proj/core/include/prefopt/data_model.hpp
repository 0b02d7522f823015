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
#include <span>
#include <string>
#include <vector>

namespace prefopt {

using TokenId = std::uint32_t;

/// Ordered token ids. Responses are non-empty; prompts may be empty.
using TokenSeq = std::vector<TokenId>;

/// Summed log-probabilities (nats) of one reference on both responses.
struct RefLogProb {
  double chosen = 0.0;
  double rejected = 0.0;

  friend bool operator==(const RefLogProb&, const RefLogProb&) = default;
};

/// Length-normalized log-probabilities (nats per token) of one model on the
/// chosen (`pos`) and rejected (`neg`) responses.
struct NormalizedLogProbPair {
  double pos = 0.0;
  double neg = 0.0;

  friend bool operator==(const NormalizedLogProbPair&, const NormalizedLogProbPair&) = default;
};

/// One (prompt, chosen, rejected) triple plus per-reference log-prob sums.
///
/// `ref_logprobs[k]` belongs to reference `k` of the owning dataset's
/// `ref_names`; the name table is stored once per dataset rather than per
/// example.
struct PreferenceExample {
  std::string id;
  TokenSeq prompt;
  TokenSeq chosen;
  TokenSeq rejected;
  std::vector<RefLogProb> ref_logprobs;

  std::size_t num_refs() const noexcept { return ref_logprobs.size(); }

  /// Reference k's log-probs divided by response lengths (or raw sums when
  /// `length_normalized` is false).
  NormalizedLogProbPair ref_pair(std::size_t k, bool length_normalized = true) const;

  friend bool operator==(const PreferenceExample&, const PreferenceExample&) = default;
};

/// Examples sharing one reference-name table and (optionally) a declared
/// vocabulary size. `vocab_size == 0` means "not declared".
struct Dataset {
  std::vector<std::string> ref_names;
  std::vector<PreferenceExample> examples;
  std::size_t vocab_size = 0;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
  std::size_t num_refs() const noexcept { return ref_names.size(); }

  /// Index of a reference by name; throws InvalidInput when absent.
  std::size_t ref_index(const std::string& name) const;
};

/// Throws InvalidInput describing the first violated example invariant.
/// `vocab_size == 0` skips the token-range check.
void validate_example(const PreferenceExample& ex, std::size_t vocab_size = 0);

/// Largest token id in the data plus one (0 for an empty collection).
std::size_t infer_vocab_size(std::span<const PreferenceExample> examples);

/// `sum / length`. Throws InvalidInput on a non-finite sum or zero length.
double normalize_logprob(double sum, std::size_t length);

/// A point on the probability simplex over K references.
class WeightVector {
 public:
  /// Normalizes `raw`; falls back to uniform when sum(raw) < 1e-12.
  /// Throws InvalidInput on K = 0 or a negative/non-finite entry.
  static WeightVector from_raw(std::span<const double> raw);
  static WeightVector uniform(std::size_t k);
  /// Basis vector e_index.
  static WeightVector basis(std::size_t k, std::size_t index);

  std::size_t size() const noexcept { return alphas_.size(); }
  double operator[](std::size_t i) const { return alphas_[i]; }
  std::span<const double> values() const noexcept { return alphas_; }

  /// Index of the single non-zero entry, or size() if not a basis vector.
  std::size_t basis_index() const noexcept;
  bool is_basis() const noexcept { return basis_index() < size(); }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  explicit WeightVector(std::vector<double> alphas) : alphas_(std::move(alphas)) {}
  std::vector<double> alphas_;
};

inline WeightVector make_weight_vector(std::span<const double> raw) {
  return WeightVector::from_raw(raw);
}

inline constexpr double kSimplexTolerance = 1e-9;
inline constexpr double kUniformFallbackThreshold = 1e-12;

/// True when all entries are >= 0 and sum to 1 within kSimplexTolerance.
bool on_simplex(std::span<const double> w) noexcept;

}  // namespace prefopt
