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

#include "prefopt/trainer.hpp"

#include <chrono>
#include <cmath>

#include "prefopt/errors.hpp"
#include "prefopt/eval_stats.hpp"

namespace prefopt {

void TrainConfig::validate(std::size_t num_refs) const {
  if (num_refs == 0) throw ConfigError("training needs at least one reference");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be > 0");
  if (!(optimizer.learning_rate > 0.0) || !std::isfinite(optimizer.learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (optimizer.clip_norm && !(*optimizer.clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");

  if (loss == LossVariant::kDpo) {
    if (weighting) throw ConfigError("loss 'dpo' trains against one reference and takes no weighting");
    if (!reference) throw ConfigError("loss 'dpo' requires a reference");
    if (*reference >= num_refs) throw ConfigError("reference index out of range");
  } else {
    if (!weighting) throw ConfigError(std::string("loss '") + to_string(loss) + "' requires a weighting strategy");
    if (reference) throw ConfigError("'reference' is only valid with loss 'dpo'");
  }
  if (per_example && weighting != StrategyKind::kOriginalPerExample) {
    throw ConfigError(std::string("per-example weights require weighting 'original', got '") +
                      (weighting ? to_string(*weighting) : to_string(loss)) + "'");
  }
  if (weighting == StrategyKind::kTsw) {
    if (!(piv > 0.0) || !std::isfinite(piv)) throw ConfigError("piv must be > 0");
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
      throw ConfigError("subsample_fraction must lie in (0, 1]");
    }
  }
}

std::string TrainConfig::method_label() const {
  if (loss == LossVariant::kDpo) return "dpo[ref=" + std::to_string(reference.value_or(0)) + "]";
  return std::string(to_string(*weighting)) + "+" + to_string(loss);
}

ResolvedWeights resolve_weights(const TrainConfig& cfg, std::size_t step, const WeightContext& ctx) {
  const std::size_t k = ctx.num_refs;
  if (cfg.loss == LossVariant::kDpo) {
    if (!cfg.reference) throw ConfigError("dpo needs a reference index");
    return {WeightVector::basis(k, *cfg.reference), {}, std::nullopt};
  }
  if (!cfg.weighting) throw ConfigError("no weighting strategy configured");

  switch (*cfg.weighting) {
    case StrategyKind::kUniform:
      return {uniform_weights(k), {}, std::nullopt};
    case StrategyKind::kVdw:
    case StrategyKind::kVaw: {
      if (ctx.offline) return {*ctx.offline, {}, std::nullopt};
      if (ctx.val.empty()) throw ConfigError("vdw/vaw weighting requires a validation set");
      return {*cfg.weighting == StrategyKind::kVdw ? vdw_weights(ctx.val) : vaw_weights(ctx.val), {}, std::nullopt};
    }
    case StrategyKind::kOriginalPerExample: {
      if (ctx.batch.empty()) throw ConfigError("per-example weighting requires the current batch");
      ResolvedWeights out{uniform_weights(k), {}, std::nullopt};
      std::vector<double> mean(k, 0.0);
      for (const auto& ex : ctx.batch) {
        out.per_example.push_back(original_per_example(ex, cfg.original_length_normalized));
        for (std::size_t j = 0; j < k; ++j) mean[j] += out.per_example.back()[j];
      }
      out.step = WeightVector::from_raw(mean);
      return out;
    }
    case StrategyKind::kSwcw:
    case StrategyKind::kSwcwOneHot: {
      if (step > 0 && ctx.prev_batch.empty()) throw ConfigError("swcw weighting requires the previous batch");
      // No previous batch exists at step 0.
      WeightVector w = step == 0 ? uniform_weights(k) : swcw_weights(ctx.prev_batch);
      if (*cfg.weighting == StrategyKind::kSwcwOneHot) w = one_hot_max(w);
      return {std::move(w), {}, std::nullopt};
    }
    case StrategyKind::kTsw: {
      if (!ctx.bandit || !ctx.bandit_rng) throw ConfigError("tsw weighting requires bandit state");
      ArmDraw draw = select_arm(*ctx.bandit, *ctx.bandit_rng);
      WeightVector w = WeightVector::basis(k, draw.arm);
      return {std::move(w), {}, std::move(draw)};
    }
  }
  throw ConfigError("unhandled weighting strategy");
}

std::vector<NormalizedLogProbPair> policy_logprobs(const BigramPolicy& policy,
                                                   std::span<const PreferenceExample> batch,
                                                   bool length_normalized) {
  std::vector<NormalizedLogProbPair> out;
  out.reserve(batch.size());
  for (const auto& ex : batch) {
    double pos = seq_logprob(policy, ex.prompt, ex.chosen);
    double neg = seq_logprob(policy, ex.prompt, ex.rejected);
    if (length_normalized) {
      pos /= static_cast<double>(ex.chosen.size());
      neg /= static_cast<double>(ex.rejected.size());
    }
    out.push_back({pos, neg});
  }
  return out;
}

PolicyGrad backprop_to_policy(const BigramPolicy& policy, std::span<const PreferenceExample> batch,
                              const BatchLoss& loss, bool length_normalized) {
  PolicyGrad grad(policy.vocab_size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const PreferenceExample& ex = batch[i];
    const double sp = length_normalized ? 1.0 / static_cast<double>(ex.chosen.size()) : 1.0;
    const double sn = length_normalized ? 1.0 / static_cast<double>(ex.rejected.size()) : 1.0;
    accumulate_logprob_grad(policy, ex.prompt, ex.chosen, loss.d_pos[i] * sp, grad);
    accumulate_logprob_grad(policy, ex.prompt, ex.rejected, loss.d_neg[i] * sn, grad);
  }
  return grad;
}

namespace {

std::optional<double> accuracy_or_none(const BigramPolicy& policy, std::span<const PreferenceExample> data) {
  if (data.empty()) return std::nullopt;
  return preference_accuracy(policy, data).accuracy;
}

}  // namespace

TrainResult train_epoch(BigramPolicy policy, const TrainData& data, const TrainConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t k = data.ref_names.empty()
                            ? (data.train.empty() ? 0 : data.train.front().num_refs())
                            : data.ref_names.size();
  if (!data.train.empty()) cfg.validate(k);
  const bool needs_val = cfg.weighting == StrategyKind::kVdw || cfg.weighting == StrategyKind::kVaw ||
                         cfg.weighting == StrategyKind::kTsw;
  if (needs_val && data.val.empty() && !data.train.empty()) {
    throw ConfigError(std::string("weighting '") + to_string(*cfg.weighting) + "' requires a validation set");
  }

  TrainResult result{std::move(policy), {}, 0.0};
  BigramPolicy& current = result.policy;
  RunSummary& summary = result.record.summary;
  summary.method = cfg.method_label();
  summary.seed = cfg.seed;
  summary.ref_names = data.ref_names;
  summary.initial_val_acc = accuracy_or_none(current, data.val);
  summary.initial_test_acc = accuracy_or_none(current, data.test);

  std::optional<WeightVector> offline;
  if (cfg.weighting == StrategyKind::kVdw && !data.val.empty()) offline = vdw_weights(data.val);
  if (cfg.weighting == StrategyKind::kVaw && !data.val.empty()) offline = vaw_weights(data.val);

  std::optional<BanditState> bandit;
  Rng bandit_rng = Rng::stream(cfg.seed, streams::id(streams::kBanditSelect));
  if (cfg.weighting == StrategyKind::kTsw && k > 0) bandit.emplace(k, cfg.piv);

  const LossConfig loss_cfg{cfg.beta, cfg.loss, cfg.length_normalized};
  OptimizerState opt_state;

  const std::size_t n = data.train.size();
  const std::size_t steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = n == 0 ? 0 : steps_per_epoch * cfg.epochs;
  std::span<const PreferenceExample> prev_batch;

  for (std::size_t step = 0; step < total_steps; ++step) {
    const std::size_t b = step % steps_per_epoch;
    const std::size_t begin = b * cfg.batch_size;
    const auto batch = data.train.subspan(begin, std::min(cfg.batch_size, n - begin));

    try {
      WeightContext ctx;
      ctx.num_refs = k;
      ctx.val = data.val;
      ctx.batch = batch;
      ctx.prev_batch = prev_batch;
      ctx.bandit = bandit ? &*bandit : nullptr;
      ctx.bandit_rng = &bandit_rng;
      ctx.offline = offline ? &*offline : nullptr;
      ResolvedWeights w = resolve_weights(cfg, step, ctx);

      const auto theta = policy_logprobs(current, batch, cfg.length_normalized);
      const BatchLoss loss = w.per_example.empty() ? loss_and_grad(batch, theta, loss_cfg, w.step)
                                                   : loss_and_grad(batch, theta, loss_cfg, w.per_example);
      PolicyGrad grad = backprop_to_policy(current, batch, loss, cfg.length_normalized);
      const double grad_norm = grad.l2_norm();
      if (!std::isfinite(grad_norm)) throw NumericalFailure("", "gradient norm", grad_norm);
      if (cfg.optimizer.clip_norm && grad_norm > *cfg.optimizer.clip_norm) {
        const double scale = *cfg.optimizer.clip_norm / grad_norm;
        for (double& g : grad.d_logits) g *= scale;
      }

      BigramPolicy next = current;
      OptimizerState next_opt = opt_state;
      optimizer_step(next.mutable_logits(), grad.d_logits, next_opt, cfg.optimizer);
      for (double x : next.logits()) {
        if (!std::isfinite(x)) throw NumericalFailure("", "policy logit", x);
      }

      StepRecord rec;
      rec.step = step;
      rec.weights.assign(w.step.values().begin(), w.step.values().end());
      rec.loss = loss.value;
      rec.grad_norm = grad_norm;
      if (w.draw) {
        rec.arm = w.draw->arm;
        rec.theta_samples = w.draw->samples;
        const auto sub = stochastic_subsample(data.val, cfg.subsample_fraction, step, cfg.seed);
        const RewardOutcome outcome = compute_reward(current, next, sub);
        rec.reward = RewardLog{outcome.acc_before, outcome.acc_after, outcome.r, sub.size()};
        bandit = update(*bandit, w.draw->arm, outcome.r);
        rec.arm_means = arm_means(*bandit);
      }

      current = std::move(next);
      opt_state = std::move(next_opt);
      if ((step + 1) % cfg.eval_every == 0 || step + 1 == total_steps) {
        rec.val_acc = accuracy_or_none(current, data.val);
        rec.test_acc = accuracy_or_none(current, data.test);
      }
      result.record.steps.push_back(std::move(rec));
      prev_batch = batch;
    } catch (const NumericalFailure& e) {
      summary.status = RunStatus::kNumericalFailure;
      summary.failure_step = step;
      summary.failure_message = e.what();
      break;
    }
  }

  summary.num_steps = result.record.steps.size();
  summary.final_val_acc = accuracy_or_none(current, data.val);
  summary.final_test_acc = accuracy_or_none(current, data.test);
  if (bandit) summary.bandit_arms.assign(bandit->arms().begin(), bandit->arms().end());
  summary.policy_checksum = current.checksum();
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace prefopt
