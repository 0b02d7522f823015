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

#include "prefopt/weighting.hpp"

#include <cmath>
#include <vector>

#include "prefopt/errors.hpp"

namespace prefopt {

namespace {

std::size_t common_k(std::span<const PreferenceExample> examples, const char* who) {
  if (examples.empty()) throw InvalidInput(std::string(who) + ": empty example set");
  const std::size_t k = examples.front().num_refs();
  for (const auto& ex : examples) {
    if (ex.num_refs() != k) throw InvalidInput(std::string(who) + ": inconsistent reference count");
  }
  if (k == 0) throw InvalidInput(std::string(who) + ": examples carry no references");
  return k;
}

std::vector<double> summed_confidence(std::span<const PreferenceExample> examples, const char* who) {
  const std::size_t k = common_k(examples, who);
  std::vector<double> raw(k, 0.0);
  for (const auto& ex : examples) {
    for (std::size_t j = 0; j < k; ++j) raw[j] += discriminative_confidence(ex, j);
  }
  return raw;
}

}  // namespace

const char* to_string(StrategyKind k) noexcept {
  switch (k) {
    case StrategyKind::kUniform: return "uniform";
    case StrategyKind::kOriginalPerExample: return "original";
    case StrategyKind::kVdw: return "vdw";
    case StrategyKind::kVaw: return "vaw";
    case StrategyKind::kSwcw: return "swcw";
    case StrategyKind::kSwcwOneHot: return "swcw_oh";
    case StrategyKind::kTsw: return "tsw";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& s) {
  for (StrategyKind k : {StrategyKind::kUniform, StrategyKind::kOriginalPerExample, StrategyKind::kVdw,
                         StrategyKind::kVaw, StrategyKind::kSwcw, StrategyKind::kSwcwOneHot, StrategyKind::kTsw}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown weighting '" + s + "' (expected uniform|original|vdw|vaw|swcw|swcw_oh|tsw)");
}

double discriminative_confidence(const PreferenceExample& ex, std::size_t k, bool length_normalized) {
  const NormalizedLogProbPair p = ex.ref_pair(k, length_normalized);
  return std::abs(p.pos - p.neg);
}

WeightVector uniform_weights(std::size_t k) { return WeightVector::uniform(k); }

WeightVector original_per_example(const PreferenceExample& ex, bool length_normalized) {
  if (ex.num_refs() == 0) throw InvalidInput("original_per_example: example carries no references");
  std::vector<double> raw(ex.num_refs());
  for (std::size_t k = 0; k < raw.size(); ++k) raw[k] = discriminative_confidence(ex, k, length_normalized);
  return WeightVector::from_raw(raw);
}

WeightVector vdw_weights(std::span<const PreferenceExample> val) {
  return WeightVector::from_raw(summed_confidence(val, "vdw_weights"));
}

WeightVector vaw_weights(std::span<const PreferenceExample> val) {
  const std::size_t k = common_k(val, "vaw_weights");
  std::vector<double> correct(k, 0.0);
  for (const auto& ex : val) {
    for (std::size_t j = 0; j < k; ++j) {
      const NormalizedLogProbPair p = ex.ref_pair(j);
      if (p.pos > p.neg) correct[j] += 1.0;
    }
  }
  return WeightVector::from_raw(correct);
}

WeightVector swcw_weights(std::span<const PreferenceExample> prev_batch) {
  return WeightVector::from_raw(summed_confidence(prev_batch, "swcw_weights"));
}

WeightVector one_hot_max(const WeightVector& w) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (w[k] > w[best]) best = k;
  }
  return WeightVector::basis(w.size(), best);
}

}  // namespace prefopt
