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

#include "prefopt/data_model.hpp"

#include <algorithm>
#include <cmath>

#include "prefopt/errors.hpp"

namespace prefopt {

NormalizedLogProbPair PreferenceExample::ref_pair(std::size_t k, bool length_normalized) const {
  const RefLogProb& r = ref_logprobs.at(k);
  if (!length_normalized) return {r.chosen, r.rejected};
  return {normalize_logprob(r.chosen, chosen.size()), normalize_logprob(r.rejected, rejected.size())};
}

std::size_t Dataset::ref_index(const std::string& name) const {
  const auto it = std::find(ref_names.begin(), ref_names.end(), name);
  if (it == ref_names.end()) throw InvalidInput("unknown reference '" + name + "'");
  return static_cast<std::size_t>(it - ref_names.begin());
}

void validate_example(const PreferenceExample& ex, std::size_t vocab_size) {
  const auto where = [&](const std::string& msg) { return "example '" + ex.id + "': " + msg; };
  if (ex.chosen.empty() || ex.rejected.empty()) throw InvalidInput(where("empty response"));
  if (ex.chosen == ex.rejected) throw InvalidInput(where("chosen and rejected are identical"));
  if (vocab_size > 0) {
    for (const TokenSeq* seq : {&ex.prompt, &ex.chosen, &ex.rejected}) {
      for (TokenId t : *seq) {
        if (t >= vocab_size) {
          throw InvalidInput(where("token id " + std::to_string(t) + " >= vocabulary size " +
                                   std::to_string(vocab_size)));
        }
      }
    }
  }
  for (std::size_t k = 0; k < ex.ref_logprobs.size(); ++k) {
    const RefLogProb& r = ex.ref_logprobs[k];
    if (!std::isfinite(r.chosen) || !std::isfinite(r.rejected)) {
      throw InvalidInput(where("non-finite reference log-prob at index " + std::to_string(k)));
    }
    if (r.chosen > 0.0 || r.rejected > 0.0) {
      throw InvalidInput(where("positive reference log-prob at index " + std::to_string(k)));
    }
  }
}

std::size_t infer_vocab_size(std::span<const PreferenceExample> examples) {
  std::size_t v = 0;
  for (const auto& ex : examples) {
    for (const TokenSeq* seq : {&ex.prompt, &ex.chosen, &ex.rejected}) {
      for (TokenId t : *seq) v = std::max<std::size_t>(v, std::size_t{t} + 1);
    }
  }
  return v;
}

double normalize_logprob(double sum, std::size_t length) {
  if (length == 0) throw InvalidInput("normalize_logprob: zero length");
  if (!std::isfinite(sum)) throw InvalidInput("normalize_logprob: non-finite sum");
  return sum / static_cast<double>(length);
}

WeightVector WeightVector::from_raw(std::span<const double> raw) {
  if (raw.empty()) throw InvalidInput("weight vector needs K >= 1");
  double total = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidInput("weight entries must be finite and >= 0");
    total += x;
  }
  if (total < kUniformFallbackThreshold) return uniform(raw.size());
  std::vector<double> alphas(raw.begin(), raw.end());
  for (double& a : alphas) a /= total;
  return WeightVector(std::move(alphas));
}

WeightVector WeightVector::uniform(std::size_t k) {
  if (k == 0) throw InvalidInput("weight vector needs K >= 1");
  return WeightVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

WeightVector WeightVector::basis(std::size_t k, std::size_t index) {
  if (index >= k) throw InvalidInput("basis index out of range");
  std::vector<double> alphas(k, 0.0);
  alphas[index] = 1.0;
  return WeightVector(std::move(alphas));
}

std::size_t WeightVector::basis_index() const noexcept {
  std::size_t found = size();
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (alphas_[i] == 0.0) continue;
    if (alphas_[i] != 1.0 || found != size()) return size();
    found = i;
  }
  return found;
}

bool on_simplex(std::span<const double> w) noexcept {
  if (w.empty()) return false;
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= kSimplexTolerance;
}

}  // namespace prefopt
