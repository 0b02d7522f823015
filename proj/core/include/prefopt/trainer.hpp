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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefopt/bandit.hpp"
#include "prefopt/data_model.hpp"
#include "prefopt/losses.hpp"
#include "prefopt/optimizer.hpp"
#include "prefopt/policy.hpp"
#include "prefopt/rng.hpp"
#include "prefopt/weighting.hpp"

namespace prefopt {

/// One training run. `loss == kDpo` trains against the single reference
/// `reference` and takes no weighting strategy; every other loss requires one.
struct TrainConfig {
  LossVariant loss = LossVariant::kDpo;
  std::optional<StrategyKind> weighting;
  std::optional<std::size_t> reference;
  std::size_t batch_size = 25;
  std::size_t epochs = 1;
  double beta = 0.1;
  bool length_normalized = true;
  /// Requests per-example weights. Only the 'original' strategy supplies them;
  /// one-hot strategies (tsw, swcw_oh) pick a single reference per batch.
  bool per_example = false;
  /// Whether the per-example ("original") weights use normalized log-probs.
  bool original_length_normalized = true;
  OptimizerConfig optimizer;
  std::size_t eval_every = 1;
  std::uint64_t seed = 0;
  double piv = kDefaultPiv;
  double subsample_fraction = kDefaultSubsampleFraction;

  /// Throws ConfigError on an invalid loss/weighting pairing or bad value.
  void validate(std::size_t num_refs) const;
  std::string method_label() const;
};

/// What a weighting strategy may consult at a given step.
struct WeightContext {
  std::size_t num_refs = 0;
  std::span<const PreferenceExample> val;
  std::span<const PreferenceExample> batch;
  /// Empty at step 0.
  std::span<const PreferenceExample> prev_batch;
  const BanditState* bandit = nullptr;
  Rng* bandit_rng = nullptr;
  /// Precomputed offline vector; recomputed from `val` when null.
  const WeightVector* offline = nullptr;
};

struct ResolvedWeights {
  /// The vector used for the step (for per-example weighting: the batch mean,
  /// logged only).
  WeightVector step;
  /// Non-empty only for per-example weighting.
  std::vector<WeightVector> per_example;
  std::optional<ArmDraw> draw;
};

/// Throws ConfigError when the context lacks what the strategy requires.
ResolvedWeights resolve_weights(const TrainConfig& cfg, std::size_t step, const WeightContext& ctx);

/// Per-example policy log-probs in the loss domain (normalized or sums).
std::vector<NormalizedLogProbPair> policy_logprobs(const BigramPolicy& policy,
                                                   std::span<const PreferenceExample> batch,
                                                   bool length_normalized);

/// Chains d loss / d l_theta through the sequence log-probs into the logits.
PolicyGrad backprop_to_policy(const BigramPolicy& policy, std::span<const PreferenceExample> batch,
                              const BatchLoss& loss, bool length_normalized);

struct RewardLog {
  double acc_before = 0.0;
  double acc_after = 0.0;
  int r = 0;
  std::size_t subsample_size = 0;

  friend bool operator==(const RewardLog&, const RewardLog&) = default;
};

struct StepRecord {
  std::size_t step = 0;
  std::vector<double> weights;
  std::optional<std::size_t> arm;
  std::vector<double> theta_samples;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::optional<double> val_acc;
  std::optional<double> test_acc;
  std::optional<RewardLog> reward;
  /// Posterior means after this step's update (TSW only).
  std::vector<double> arm_means;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

enum class RunStatus { kCompleted, kNumericalFailure };

struct RunSummary {
  RunStatus status = RunStatus::kCompleted;
  std::optional<std::size_t> failure_step;
  std::string failure_message;
  std::string method;
  std::uint64_t seed = 0;
  std::size_t num_steps = 0;
  std::vector<std::string> ref_names;
  std::optional<double> initial_val_acc;
  std::optional<double> initial_test_acc;
  std::optional<double> final_val_acc;
  std::optional<double> final_test_acc;
  std::vector<BanditState::Arm> bandit_arms;
  std::uint64_t policy_checksum = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunRecord {
  std::vector<StepRecord> steps;
  RunSummary summary;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct TrainData {
  std::span<const PreferenceExample> train;
  std::span<const PreferenceExample> val;
  std::span<const PreferenceExample> test;
  std::vector<std::string> ref_names;
};

struct TrainResult {
  BigramPolicy policy;
  RunRecord record;
  double wall_clock_seconds = 0.0;
};

/// Runs `cfg.epochs` passes over `data.train` in its given order. A numerical
/// failure stops the run: the returned policy is the last finite one and the
/// summary names the failing step.
TrainResult train_epoch(BigramPolicy policy, const TrainData& data, const TrainConfig& cfg);

}  // namespace prefopt
