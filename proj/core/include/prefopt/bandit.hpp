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

#include "prefopt/data_model.hpp"
#include "prefopt/policy.hpp"
#include "prefopt/rng.hpp"

namespace prefopt {

/// Beta-Bernoulli posterior over K arms, each started at Beta(piv, piv).
class BanditState {
 public:
  struct Arm {
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t pulls = 0;

    friend bool operator==(const Arm&, const Arm&) = default;
  };

  /// Throws InvalidInput unless K >= 1 and piv > 0.
  BanditState(std::size_t num_arms, double piv);

  std::size_t num_arms() const noexcept { return arms_.size(); }
  double piv() const noexcept { return piv_; }
  const Arm& arm(std::size_t k) const { return arms_.at(k); }
  std::span<const Arm> arms() const noexcept { return arms_; }
  std::size_t total_pulls() const noexcept;

  /// Conjugate update of `arm` with reward r in {0, 1}; other arms untouched.
  BanditState updated(std::size_t arm, int reward) const;

  friend bool operator==(const BanditState&, const BanditState&) = default;

 private:
  double piv_;
  std::vector<Arm> arms_;
};

inline constexpr double kDefaultPiv = 5.0;
inline constexpr double kDefaultSubsampleFraction = 0.2;

struct ArmDraw {
  std::size_t arm = 0;
  /// One Beta draw per arm, in arm order.
  std::vector<double> samples;
};

/// Thompson step: one Beta(alpha_k, beta_k) draw per arm, argmax (lowest index
/// on ties).
ArmDraw select_arm(const BanditState& state, Rng& rng);

/// update(state, arm, r) == state.updated(arm, r).
BanditState update(const BanditState& state, std::size_t arm, int reward);

/// alpha_k / (alpha_k + beta_k) per arm.
std::vector<double> arm_means(const BanditState& state);

/// ceil(fraction * |val|) examples drawn without replacement from the stream
/// derived from (seed, step). Throws InvalidInput on an empty set or a
/// fraction outside (0, 1].
std::vector<PreferenceExample> stochastic_subsample(std::span<const PreferenceExample> val, double fraction,
                                                    std::uint64_t step, std::uint64_t seed);

struct RewardOutcome {
  int r = 0;
  double acc_before = 0.0;
  double acc_after = 0.0;
  std::vector<std::string> subsample_ids;
};

/// Accuracy of both policies on the same subsample; r = 1 iff strictly better
/// after the step.
RewardOutcome compute_reward(const BigramPolicy& policy_before, const BigramPolicy& policy_after,
                             std::span<const PreferenceExample> subsample);

}  // namespace prefopt
