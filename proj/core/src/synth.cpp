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

#include "prefopt/synth.hpp"

#include <cmath>

#include "prefopt/errors.hpp"

namespace prefopt {

const char* to_string(LabelMode m) noexcept {
  return m == LabelMode::kDeterministic ? "deterministic" : "bradley_terry";
}

LabelMode parse_label_mode(const std::string& s) {
  if (s == "deterministic") return LabelMode::kDeterministic;
  if (s == "bradley_terry") return LabelMode::kBradleyTerry;
  throw ConfigError("unknown label_mode '" + s + "' (expected deterministic|bradley_terry)");
}

void SynthConfig::validate() const {
  if (vocab_size < 2) throw ConfigError("synth: vocab_size must be >= 2");
  if (response_len_min < 1 || response_len_max < response_len_min) {
    throw ConfigError("synth: need 1 <= response_len_min <= response_len_max");
  }
  if (gammas.empty()) throw ConfigError("synth: at least one reference (gamma) is required");
  if (temperatures.size() != gammas.size()) throw ConfigError("synth: gammas and temperatures differ in length");
  if (!ref_names.empty() && ref_names.size() != gammas.size()) {
    throw ConfigError("synth: ref_names and gammas differ in length");
  }
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("synth: every gamma must lie in [0, 1]");
  }
  for (double t : temperatures) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("synth: every temperature must be > 0");
  }
  if (!(logit_scale > 0.0) || !std::isfinite(logit_scale)) throw ConfigError("synth: logit_scale must be > 0");
}

std::vector<std::string> SynthConfig::resolved_ref_names() const {
  if (!ref_names.empty()) return ref_names;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < gammas.size(); ++k) names.push_back("ref" + std::to_string(k));
  return names;
}

TruthTables make_truth_tables(std::size_t vocab_size, std::uint64_t seed, double logit_scale) {
  if (vocab_size < 2) throw InvalidInput("make_truth_tables: V must be >= 2");
  Rng rng = Rng::stream(seed, streams::id(streams::kSynthTables));
  const auto draw = [&] {
    std::vector<double> logits(vocab_size * vocab_size);
    for (double& x : logits) x = logit_scale * rng.normal();
    return BigramPolicy(vocab_size, std::move(logits));
  };
  BigramPolicy good = draw();
  BigramPolicy bad = draw();
  return {std::move(good), std::move(bad)};
}

BigramPolicy make_reference(const BigramPolicy& good, const BigramPolicy& bad, double gamma, double temperature) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("make_reference: gamma must lie in [0, 1]");
  if (!(temperature > 0.0)) throw InvalidInput("make_reference: temperature must be > 0");
  if (good.vocab_size() != bad.vocab_size()) throw InvalidInput("make_reference: table shapes differ");
  const auto g = good.logits();
  const auto b = bad.logits();
  std::vector<double> logits(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) logits[i] = ((1.0 - gamma) * g[i] + gamma * b[i]) / temperature;
  return BigramPolicy(good.vocab_size(), std::move(logits));
}

TokenSeq sample_response(const BigramPolicy& policy, const TokenSeq& prompt, std::size_t length, Rng& rng) {
  TokenSeq out;
  out.reserve(length);
  TokenId prev = prompt.empty() ? kBosToken : prompt.back();
  for (std::size_t i = 0; i < length; ++i) {
    const auto p = policy.softmax_row(prev);
    const double u = rng.uniform();
    double acc = 0.0;
    TokenId next = static_cast<TokenId>(p.size() - 1);
    for (std::size_t j = 0; j < p.size(); ++j) {
      acc += p[j];
      if (u < acc) {
        next = static_cast<TokenId>(j);
        break;
      }
    }
    out.push_back(next);
    prev = next;
  }
  return out;
}

PreferenceExample sample_pair(const TruthTables& truth, const std::vector<BigramPolicy>& references,
                              const SynthConfig& cfg, Rng& rng, std::string id) {
  PreferenceExample ex;
  ex.id = std::move(id);
  ex.prompt.reserve(cfg.prompt_len);
  for (std::size_t i = 0; i < cfg.prompt_len; ++i) {
    ex.prompt.push_back(static_cast<TokenId>(rng.uniform_index(cfg.vocab_size)));
  }
  const std::uint64_t span = cfg.response_len_max - cfg.response_len_min + 1;

  TokenSeq good_sample;
  TokenSeq bad_sample;
  for (int attempt = 0;; ++attempt) {
    const std::size_t len_good = cfg.response_len_min + rng.uniform_index(span);
    const std::size_t len_bad = cfg.response_len_min + rng.uniform_index(span);
    good_sample = sample_response(truth.good, ex.prompt, len_good, rng);
    bad_sample = sample_response(truth.bad, ex.prompt, len_bad, rng);
    if (good_sample != bad_sample) break;
    if (attempt >= kMaxResampleRetries) {
      throw InvalidInput("sample_pair: identical responses after " + std::to_string(kMaxResampleRetries) +
                         " retries for '" + ex.id + "'");
    }
  }

  bool good_is_chosen = true;
  if (cfg.label_mode == LabelMode::kBradleyTerry) {
    const double r_good = seq_logprob(truth.good, ex.prompt, good_sample) / static_cast<double>(good_sample.size());
    const double r_bad = seq_logprob(truth.good, ex.prompt, bad_sample) / static_cast<double>(bad_sample.size());
    const double p_good = 1.0 / (1.0 + std::exp(-(r_good - r_bad)));
    good_is_chosen = rng.bernoulli(p_good);
  }
  ex.chosen = good_is_chosen ? std::move(good_sample) : std::move(bad_sample);
  ex.rejected = good_is_chosen ? std::move(bad_sample) : std::move(good_sample);

  ex.ref_logprobs.reserve(references.size());
  for (const auto& ref : references) {
    ex.ref_logprobs.push_back({seq_logprob(ref, ex.prompt, ex.chosen), seq_logprob(ref, ex.prompt, ex.rejected)});
  }
  return ex;
}

SynthBenchmark generate(const SynthConfig& cfg) {
  cfg.validate();
  SynthBenchmark bench{make_truth_tables(cfg.vocab_size, cfg.seed, cfg.logit_scale), {}, {}};
  for (std::size_t k = 0; k < cfg.num_refs(); ++k) {
    bench.references.push_back(make_reference(bench.truth.good, bench.truth.bad, cfg.gammas[k], cfg.temperatures[k]));
  }
  bench.data.ref_names = cfg.resolved_ref_names();
  bench.data.vocab_size = cfg.vocab_size;
  bench.data.examples.reserve(cfg.num_pairs);
  for (std::size_t i = 0; i < cfg.num_pairs; ++i) {
    Rng rng = Rng::stream(cfg.seed, streams::id(streams::kSynthExample, i));
    bench.data.examples.push_back(
        sample_pair(bench.truth, bench.references, cfg, rng, "synth-" + std::to_string(i)));
  }
  return bench;
}

}  // namespace prefopt
