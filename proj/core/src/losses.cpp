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

#include "prefopt/losses.hpp"

#include <cmath>
#include <limits>

#include "prefopt/errors.hpp"

namespace prefopt {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InvalidInput(std::string(what) + " must be finite");
}

void require_same_k(const WeightVector& w, std::size_t k) {
  if (w.size() != k) {
    throw InvalidInput("weight vector has K=" + std::to_string(w.size()) + " but " + std::to_string(k) +
                       " references were supplied");
  }
}

// -log sum_{k: alpha_k > 0} alpha_k exp(-l_k)
double neg_log_weighted_sum_exp(const WeightVector& w, std::span<const double> l) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < l.size(); ++k) {
    if (w[k] > 0.0) m = std::max(m, std::log(w[k]) - l[k]);
  }
  if (!std::isfinite(m)) return -m;
  double s = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) {
    if (w[k] > 0.0) s += std::exp(std::log(w[k]) - l[k] - m);
  }
  return -(m + std::log(s));
}

void check_finite(const std::string& id, const char* quantity, double x) {
  if (!std::isfinite(x)) throw NumericalFailure(id, quantity, x);
}

template <typename WeightsAt>
BatchLoss batch_loss(std::span<const PreferenceExample> batch, std::span<const NormalizedLogProbPair> theta,
                     const LossConfig& cfg, WeightsAt weights_at) {
  if (batch.empty()) throw InvalidInput("loss_and_grad: empty batch");
  if (theta.size() != batch.size()) throw InvalidInput("loss_and_grad: policy log-probs do not match batch size");
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) throw InvalidInput("loss_and_grad: beta must be > 0");

  const double n = static_cast<double>(batch.size());
  BatchLoss out;
  out.per_example_logits.reserve(batch.size());
  out.d_pos.reserve(batch.size());
  out.d_neg.reserve(batch.size());

  std::vector<NormalizedLogProbPair> refs;
  std::vector<double> scratch;
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const PreferenceExample& ex = batch[i];
    const WeightVector& w = weights_at(i);
    require_same_k(w, ex.num_refs());
    check_finite(ex.id, "policy chosen log-prob", theta[i].pos);
    check_finite(ex.id, "policy rejected log-prob", theta[i].neg);

    refs.clear();
    for (std::size_t k = 0; k < ex.num_refs(); ++k) refs.push_back(ex.ref_pair(k, cfg.length_normalized));

    ExampleLoss el;
    switch (cfg.variant) {
      case LossVariant::kDpo: {
        const std::size_t k = w.basis_index();
        if (k >= w.size()) throw InvalidInput("dpo loss needs a one-hot weight vector");
        el = logit_loss(ln_dpo_logit(theta[i], refs[k], cfg.beta), cfg.beta);
        break;
      }
      case LossVariant::kMrpo:
      case LossVariant::kMrpoGeo: {
        const Mixture mix = cfg.variant == LossVariant::kMrpo ? Mixture::kHarmonic : Mixture::kGeometric;
        scratch.resize(refs.size());
        for (std::size_t k = 0; k < refs.size(); ++k) scratch[k] = refs[k].pos;
        const double ref_pos =
            mix == Mixture::kHarmonic ? harmonic_logref(w, scratch) : geometric_logref(w, scratch);
        for (std::size_t k = 0; k < refs.size(); ++k) scratch[k] = refs[k].neg;
        const double ref_neg =
            mix == Mixture::kHarmonic ? harmonic_logref(w, scratch) : geometric_logref(w, scratch);
        check_finite(ex.id, "reference mixture log-prob (chosen)", ref_pos);
        check_finite(ex.id, "reference mixture log-prob (rejected)", ref_neg);
        const double z = cfg.beta * ((theta[i].pos - theta[i].neg) + (ref_neg - ref_pos));
        el = logit_loss(z, cfg.beta);
        break;
      }
      case LossVariant::kMdpo:
        el = mdpo_loss(theta[i], refs, w, cfg.beta);
        break;
    }
    check_finite(ex.id, "logit", el.logit);
    check_finite(ex.id, "loss", el.value);
    check_finite(ex.id, "loss gradient", el.d_pos);
    check_finite(ex.id, "loss gradient", el.d_neg);

    total += el.value;
    out.per_example_logits.push_back(el.logit);
    out.d_pos.push_back(el.d_pos / n);
    out.d_neg.push_back(el.d_neg / n);
  }
  out.value = total / n;
  check_finite("", "batch loss", out.value);
  return out;
}

}  // namespace

const char* to_string(LossVariant v) noexcept {
  switch (v) {
    case LossVariant::kDpo: return "dpo";
    case LossVariant::kMrpo: return "mrpo";
    case LossVariant::kMrpoGeo: return "mrpo_geo";
    case LossVariant::kMdpo: return "mdpo";
  }
  return "?";
}

LossVariant parse_loss_variant(const std::string& s) {
  if (s == "dpo") return LossVariant::kDpo;
  if (s == "mrpo") return LossVariant::kMrpo;
  if (s == "mrpo_geo") return LossVariant::kMrpoGeo;
  if (s == "mdpo") return LossVariant::kMdpo;
  throw ConfigError("unknown loss '" + s + "' (expected dpo|mrpo|mrpo_geo|mdpo)");
}

double softplus(double x) noexcept {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double ln_dpo_logit(const NormalizedLogProbPair& theta, const NormalizedLogProbPair& ref, double beta) {
  require_finite(theta.pos, "policy log-prob");
  require_finite(theta.neg, "policy log-prob");
  require_finite(ref.pos, "reference log-prob");
  require_finite(ref.neg, "reference log-prob");
  require_finite(beta, "beta");
  return beta * ((theta.pos - ref.pos) - (theta.neg - ref.neg));
}

double harmonic_logref(const WeightVector& weights, std::span<const double> ref_logprobs) {
  require_same_k(weights, ref_logprobs.size());
  for (double l : ref_logprobs) require_finite(l, "reference log-prob");
  return neg_log_weighted_sum_exp(weights, ref_logprobs);
}

double geometric_logref(const WeightVector& weights, std::span<const double> ref_logprobs) {
  require_same_k(weights, ref_logprobs.size());
  double s = 0.0;
  for (std::size_t k = 0; k < ref_logprobs.size(); ++k) {
    require_finite(ref_logprobs[k], "reference log-prob");
    if (weights[k] > 0.0) s += weights[k] * ref_logprobs[k];
  }
  return s;
}

double mrpo_logit(const NormalizedLogProbPair& theta, std::span<const NormalizedLogProbPair> refs,
                  const WeightVector& weights, double beta, Mixture mixture) {
  require_same_k(weights, refs.size());
  require_finite(theta.pos, "policy log-prob");
  require_finite(theta.neg, "policy log-prob");
  std::vector<double> pos(refs.size());
  std::vector<double> neg(refs.size());
  for (std::size_t k = 0; k < refs.size(); ++k) {
    pos[k] = refs[k].pos;
    neg[k] = refs[k].neg;
  }
  const auto logref = [&](std::span<const double> l) {
    return mixture == Mixture::kHarmonic ? harmonic_logref(weights, l) : geometric_logref(weights, l);
  };
  return beta * ((theta.pos - theta.neg) + (logref(neg) - logref(pos)));
}

ExampleLoss logit_loss(double z, double beta) {
  // d softplus(-z)/dz = -sigmoid(-z); dz/d l_pos = beta, dz/d l_neg = -beta.
  const double s = sigmoid(-z);
  return {softplus(-z), z, -beta * s, beta * s};
}

ExampleLoss mdpo_loss(const NormalizedLogProbPair& theta, std::span<const NormalizedLogProbPair> refs,
                      const WeightVector& weights, double beta) {
  require_same_k(weights, refs.size());
  ExampleLoss out;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const double z = ln_dpo_logit(theta, refs[k], beta);
    const ExampleLoss term = logit_loss(z, beta);
    out.value += weights[k] * term.value;
    out.logit += weights[k] * z;
    out.d_pos += weights[k] * term.d_pos;
    out.d_neg += weights[k] * term.d_neg;
  }
  return out;
}

BatchLoss loss_and_grad(std::span<const PreferenceExample> batch,
                        std::span<const NormalizedLogProbPair> policy_logprobs, const LossConfig& cfg,
                        const WeightVector& weights) {
  return batch_loss(batch, policy_logprobs, cfg, [&](std::size_t) -> const WeightVector& { return weights; });
}

BatchLoss loss_and_grad(std::span<const PreferenceExample> batch,
                        std::span<const NormalizedLogProbPair> policy_logprobs, const LossConfig& cfg,
                        std::span<const WeightVector> per_example_weights) {
  if (per_example_weights.size() != batch.size()) {
    throw InvalidInput("loss_and_grad: need one weight vector per example");
  }
  return batch_loss(batch, policy_logprobs, cfg,
                    [&](std::size_t i) -> const WeightVector& { return per_example_weights[i]; });
}

}  // namespace prefopt
