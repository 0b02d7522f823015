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

#include "prefopt/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prefopt/errors.hpp"
#include "prefopt/eval_stats.hpp"

namespace prefopt {

BanditState::BanditState(std::size_t num_arms, double piv) : piv_(piv) {
  if (num_arms == 0) throw InvalidInput("bandit needs at least one arm");
  if (!(piv > 0.0) || !std::isfinite(piv)) throw InvalidInput("prior initialization value must be > 0");
  arms_.assign(num_arms, Arm{piv, piv, 0});
}

std::size_t BanditState::total_pulls() const noexcept {
  std::size_t t = 0;
  for (const auto& a : arms_) t += a.pulls;
  return t;
}

BanditState BanditState::updated(std::size_t arm, int reward) const {
  if (arm >= arms_.size()) throw InvalidInput("bandit update: arm out of range");
  if (reward != 0 && reward != 1) throw InvalidInput("bandit update: reward must be 0 or 1");
  BanditState next = *this;
  Arm& a = next.arms_[arm];
  if (reward == 1) a.alpha += 1.0;
  else a.beta += 1.0;
  ++a.pulls;
  return next;
}

ArmDraw select_arm(const BanditState& state, Rng& rng) {
  ArmDraw draw;
  draw.samples.reserve(state.num_arms());
  for (const auto& a : state.arms()) draw.samples.push_back(rng.beta(a.alpha, a.beta));
  for (std::size_t k = 1; k < draw.samples.size(); ++k) {
    if (draw.samples[k] > draw.samples[draw.arm]) draw.arm = k;
  }
  return draw;
}

BanditState update(const BanditState& state, std::size_t arm, int reward) { return state.updated(arm, reward); }

std::vector<double> arm_means(const BanditState& state) {
  std::vector<double> mu;
  mu.reserve(state.num_arms());
  for (const auto& a : state.arms()) mu.push_back(a.alpha / (a.alpha + a.beta));
  return mu;
}

std::vector<PreferenceExample> stochastic_subsample(std::span<const PreferenceExample> val, double fraction,
                                                    std::uint64_t step, std::uint64_t seed) {
  if (val.empty()) throw InvalidInput("stochastic_subsample: empty validation set");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidInput("stochastic_subsample: fraction must lie in (0, 1]");
  const double exact = fraction * static_cast<double>(val.size());
  std::size_t m = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  m = std::min(std::max<std::size_t>(m, 1), val.size());

  std::vector<std::size_t> idx(val.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, streams::id(streams::kValSubsample, step));
  // Partial Fisher-Yates: the first m slots become a uniform m-subset.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.uniform_index(val.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<PreferenceExample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(val[idx[i]]);
  return out;
}

RewardOutcome compute_reward(const BigramPolicy& policy_before, const BigramPolicy& policy_after,
                             std::span<const PreferenceExample> subsample) {
  if (subsample.empty()) throw InvalidInput("compute_reward: empty subsample");
  RewardOutcome out;
  out.acc_before = preference_accuracy(policy_before, subsample).accuracy;
  out.acc_after = preference_accuracy(policy_after, subsample).accuracy;
  out.r = out.acc_after > out.acc_before ? 1 : 0;
  out.subsample_ids.reserve(subsample.size());
  for (const auto& ex : subsample) out.subsample_ids.push_back(ex.id);
  return out;
}

}  // namespace prefopt
