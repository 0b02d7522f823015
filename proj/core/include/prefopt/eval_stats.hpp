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
#include <vector>

#include "prefopt/data_model.hpp"
#include "prefopt/policy.hpp"

namespace prefopt {

struct AccuracyReport {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

/// Fraction of pairs whose normalized chosen log-prob strictly exceeds the
/// normalized rejected log-prob under the trainable policy. Ties are wrong.
AccuracyReport preference_accuracy(const PolicyScorer& policy, std::span<const PreferenceExample> data);
AccuracyReport preference_accuracy(const BigramPolicy& policy, std::span<const PreferenceExample> data);
/// Same metric for reference `k`, read from the stored log-prob sums.
AccuracyReport reference_accuracy(std::span<const PreferenceExample> data, std::size_t k);

enum class Sidedness { kGreater };

struct RankCorrReport {
  double tau = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  Sidedness sidedness = Sidedness::kGreater;
  /// True when p was enumerated over all n! permutations.
  bool exact = true;
};

/// Largest n for which the permutation null is enumerated exactly.
inline constexpr std::size_t kExactPermutationLimit = 8;
inline constexpr std::size_t kMonteCarloPermutations = 100000;

/// Kendall's tau-b only (no p-value). Throws InvalidInput when n < 2, the
/// lengths differ, or either input is constant.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// tau-b with a one-sided permutation p-value P(tau* >= tau_obs). Exact for
/// n <= kExactPermutationLimit; otherwise (1 + hits) / (1 + M) with M seeded
/// random permutations.
RankCorrReport kendall_tau(std::span<const double> x, std::span<const double> y, std::uint64_t seed = 0);

/// Product-moment correlation. Throws InvalidInput for n < 2 or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct SeedAggregate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
  /// Set when n == 1 and the standard error is reported as 0.
  bool single_value = false;
};

/// Mean and s / sqrt(n) with the n-1 sample deviation.
SeedAggregate aggregate_seeds(std::span<const double> values);

}  // namespace prefopt
