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
#include <span>
#include <string>

#include "prefopt/data_model.hpp"

namespace prefopt {

enum class StrategyKind { kUniform, kOriginalPerExample, kVdw, kVaw, kSwcw, kSwcwOneHot, kTsw };

const char* to_string(StrategyKind k) noexcept;
StrategyKind parse_strategy(const std::string& s);

/// Offline strategies resolve one vector before training.
constexpr bool is_offline(StrategyKind k) noexcept {
  return k == StrategyKind::kUniform || k == StrategyKind::kVdw || k == StrategyKind::kVaw;
}
/// Strategies whose per-step vector is always a basis vector.
constexpr bool is_one_hot(StrategyKind k) noexcept {
  return k == StrategyKind::kSwcwOneHot || k == StrategyKind::kTsw;
}

/// |l_k(chosen) - l_k(rejected)|, the discriminative confidence of reference k.
double discriminative_confidence(const PreferenceExample& ex, std::size_t k, bool length_normalized = true);

WeightVector uniform_weights(std::size_t k);

/// alpha_k proportional to this example's discriminative confidence.
WeightVector original_per_example(const PreferenceExample& ex, bool length_normalized = true);

/// alpha_k proportional to summed discriminative confidence over `val`.
/// Throws InvalidInput on an empty set.
WeightVector vdw_weights(std::span<const PreferenceExample> val);

/// alpha_k proportional to the number of `val` pairs reference k ranks
/// correctly (strict inequality on normalized log-probs).
WeightVector vaw_weights(std::span<const PreferenceExample> val);

/// Same score as VDW evaluated on the previous mini-batch.
WeightVector swcw_weights(std::span<const PreferenceExample> prev_batch);

/// e_{argmax}, ties to the lowest index.
WeightVector one_hot_max(const WeightVector& w);

}  // namespace prefopt
