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
#include <vector>

#include "prefopt/data_model.hpp"

namespace prefopt {

enum class LossVariant { kDpo, kMrpo, kMrpoGeo, kMdpo };
enum class Mixture { kHarmonic, kGeometric };

const char* to_string(LossVariant v) noexcept;
LossVariant parse_loss_variant(const std::string& s);

struct LossConfig {
  double beta = 0.1;
  LossVariant variant = LossVariant::kMrpo;
  /// Divide every log-prob by its response length before forming logits.
  bool length_normalized = true;
};

/// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept;
/// 1 / (1 + exp(-x)) without overflow.
double sigmoid(double x) noexcept;

/// beta * [(theta.pos - ref.pos) - (theta.neg - ref.neg)].
double ln_dpo_logit(const NormalizedLogProbPair& theta, const NormalizedLogProbPair& ref, double beta);

/// Log of the weighted harmonic-mean reference in the per-token domain:
///   L_ref = -log sum_k alpha_k exp(-l_k),
/// evaluated with max-subtraction. Arms with alpha_k == 0 are skipped.
double harmonic_logref(const WeightVector& weights, std::span<const double> ref_logprobs);

/// Unnormalized weighted geometric mixture: sum_k alpha_k l_k.
double geometric_logref(const WeightVector& weights, std::span<const double> ref_logprobs);

/// beta * [(theta.pos - theta.neg) + (L_ref(neg) - L_ref(pos))] with L_ref from
/// the selected mixture.
double mrpo_logit(const NormalizedLogProbPair& theta, std::span<const NormalizedLogProbPair> refs,
                  const WeightVector& weights, double beta, Mixture mixture = Mixture::kHarmonic);

/// Loss contribution of one example together with its derivatives with respect
/// to the policy's (normalized) log-probs of the chosen and rejected response.
struct ExampleLoss {
  double value = 0.0;
  /// The example's logit z; for MDPO the alpha-weighted mean of the z_k.
  double logit = 0.0;
  double d_pos = 0.0;
  double d_neg = 0.0;
};

/// sum_k alpha_k softplus(-z_k), z_k the LN-DPO logit against reference k.
ExampleLoss mdpo_loss(const NormalizedLogProbPair& theta, std::span<const NormalizedLogProbPair> refs,
                      const WeightVector& weights, double beta);

/// Single-logit loss softplus(-z) with its derivatives (MRPO / DPO shape).
ExampleLoss logit_loss(double z, double beta);

struct BatchLoss {
  /// Mean loss over the batch.
  double value = 0.0;
  std::vector<double> per_example_logits;
  /// Derivatives of `value` (i.e. already divided by the batch size).
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};

/// Evaluates the configured loss over a batch with one weight vector for all
/// examples. `policy_logprobs[i]` must be in the same domain (normalized or
/// not) as `cfg.length_normalized`. The dpo variant requires a basis vector.
/// Throws NumericalFailure naming the example and quantity on any non-finite
/// intermediate.
BatchLoss loss_and_grad(std::span<const PreferenceExample> batch,
                        std::span<const NormalizedLogProbPair> policy_logprobs, const LossConfig& cfg,
                        const WeightVector& weights);

/// As above with one weight vector per example (per-example weighting).
BatchLoss loss_and_grad(std::span<const PreferenceExample> batch,
                        std::span<const NormalizedLogProbPair> policy_logprobs, const LossConfig& cfg,
                        std::span<const WeightVector> per_example_weights);

}  // namespace prefopt
