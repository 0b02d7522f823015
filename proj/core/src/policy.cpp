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

#include "prefopt/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>

#include "json.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/rng.hpp"

namespace prefopt {

namespace {

void check_tokens(std::size_t vocab, const TokenSeq& prompt, const TokenSeq& response) {
  if (response.empty()) throw InvalidInput("seq_logprob: empty response");
  if (vocab == 0) throw InvalidInput("seq_logprob: policy has no vocabulary");
  for (const TokenSeq* seq : {&prompt, &response}) {
    for (TokenId t : *seq) {
      if (t >= vocab) {
        throw InvalidInput("token id " + std::to_string(t) + " >= vocabulary size " + std::to_string(vocab));
      }
    }
  }
}

// Shift and log-partition of a row: log_softmax(x)[j] = (x[j] - shift) - log_z.
// The max term is kept out of the sum so log1p sees the small remainder; this keeps
// full relative precision for near-certain tokens.
struct RowNormalizer {
  double shift = 0.0;
  double log_z = 0.0;

  explicit RowNormalizer(std::span<const double> xs) {
    const auto top = std::max_element(xs.begin(), xs.end());
    shift = *top;
    double rest = 0.0;
    for (auto it = xs.begin(); it != xs.end(); ++it) {
      if (it != top) rest += std::exp(*it - shift);
    }
    log_z = std::log1p(rest);
  }

  double operator()(double x) const { return (x - shift) - log_z; }
};

}  // namespace

BigramPolicy::BigramPolicy(std::size_t vocab_size) : vocab_(vocab_size), logits_(vocab_size * vocab_size, 0.0) {
  if (vocab_size == 0) throw InvalidInput("BigramPolicy: vocabulary size must be >= 1");
}

BigramPolicy::BigramPolicy(std::size_t vocab_size, std::vector<double> logits)
    : vocab_(vocab_size), logits_(std::move(logits)) {
  if (vocab_size == 0) throw InvalidInput("BigramPolicy: vocabulary size must be >= 1");
  if (logits_.size() != vocab_size * vocab_size) throw InvalidInput("BigramPolicy: logits must be V*V");
  if (!std::all_of(logits_.begin(), logits_.end(), [](double x) { return std::isfinite(x); })) {
    throw InvalidInput("BigramPolicy: non-finite logit");
  }
}

std::vector<double> BigramPolicy::softmax_row(TokenId prev) const {
  const auto r = row(prev);
  const RowNormalizer norm(r);
  std::vector<double> p(vocab_);
  for (std::size_t j = 0; j < vocab_; ++j) p[j] = std::exp(norm(r[j]));
  return p;
}

std::uint64_t BigramPolicy::checksum() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(vocab_);
  for (double x : logits_) mix(std::bit_cast<std::uint64_t>(x));
  return h;
}

BigramPolicy random_policy(std::size_t vocab_size, double scale, std::uint64_t seed) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InvalidInput("random_policy: scale must be finite and >= 0");
  std::vector<double> logits(vocab_size * vocab_size, 0.0);
  if (scale > 0.0) {
    Rng rng = Rng::stream(seed, streams::id(streams::kPolicyInit));
    for (double& x : logits) x = scale * rng.normal();
  }
  return BigramPolicy(vocab_size, std::move(logits));
}

double PolicyGrad::l2_norm() const noexcept {
  double s = 0.0;
  for (double g : d_logits) s += g * g;
  return std::sqrt(s);
}

double seq_logprob(const BigramPolicy& policy, const TokenSeq& prompt, const TokenSeq& response) {
  const std::size_t v = policy.vocab_size();
  check_tokens(v, prompt, response);
  TokenId prev = prompt.empty() ? kBosToken : prompt.back();
  double total = 0.0;
  for (TokenId next : response) {
    const auto r = policy.row(prev);
    total += RowNormalizer(r)(r[next]);
    prev = next;
  }
  return total;
}

void accumulate_logprob_grad(const BigramPolicy& policy, const TokenSeq& prompt, const TokenSeq& response,
                             double scale, PolicyGrad& grad) {
  const std::size_t v = policy.vocab_size();
  check_tokens(v, prompt, response);
  if (grad.vocab_size != v) throw InvalidInput("accumulate_logprob_grad: gradient shape mismatch");
  TokenId prev = prompt.empty() ? kBosToken : prompt.back();
  std::vector<double> p;
  for (TokenId next : response) {
    p = policy.softmax_row(prev);
    double* g = grad.d_logits.data() + std::size_t{prev} * v;
    for (std::size_t j = 0; j < v; ++j) g[j] -= scale * p[j];
    g[next] += scale;
    prev = next;
  }
}

PolicyGrad logprob_grad(const BigramPolicy& policy, const TokenSeq& prompt, const TokenSeq& response) {
  PolicyGrad grad(policy.vocab_size());
  accumulate_logprob_grad(policy, prompt, response, 1.0, grad);
  return grad;
}

PolicyScorer::PolicyScorer(const BigramPolicy& policy)
    : vocab_(policy.vocab_size()), log_probs_(policy.logits().begin(), policy.logits().end()) {
  for (std::size_t i = 0; i < vocab_; ++i) {
    std::span<double> r(log_probs_.data() + i * vocab_, vocab_);
    const RowNormalizer norm(r);
    for (double& x : r) x = norm(x);
  }
}

double PolicyScorer::seq_logprob(const TokenSeq& prompt, const TokenSeq& response) const {
  check_tokens(vocab_, prompt, response);
  TokenId prev = prompt.empty() ? kBosToken : prompt.back();
  double total = 0.0;
  for (TokenId next : response) {
    total += log_probs_[std::size_t{prev} * vocab_ + next];
    prev = next;
  }
  return total;
}

NormalizedLogProbPair PolicyScorer::normalized_pair(const PreferenceExample& ex, bool length_normalized) const {
  const double pos = seq_logprob(ex.prompt, ex.chosen);
  const double neg = seq_logprob(ex.prompt, ex.rejected);
  if (!length_normalized) return {pos, neg};
  return {pos / static_cast<double>(ex.chosen.size()), neg / static_cast<double>(ex.rejected.size())};
}

void save_checkpoint(const std::filesystem::path& path, const BigramPolicy& policy) {
  nlohmann::ordered_json j;
  j["format"] = "prefopt.bigram.v1";
  j["vocab_size"] = policy.vocab_size();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < policy.vocab_size(); ++i) {
    const auto r = policy.row(static_cast<TokenId>(i));
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["logits"] = std::move(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write checkpoint '" + path.string() + "'");
  out << j.dump() << '\n';
}

BigramPolicy load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open checkpoint '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format").get<std::string>() != "prefopt.bigram.v1") {
      throw InvalidInput("unsupported checkpoint format in '" + path.string() + "'");
    }
    const auto v = j.at("vocab_size").get<std::size_t>();
    const auto& rows = j.at("logits");
    if (!rows.is_array() || rows.size() != v) throw InvalidInput("checkpoint logits must have V rows");
    std::vector<double> logits;
    logits.reserve(v * v);
    for (const auto& r : rows) {
      if (!r.is_array() || r.size() != v) throw InvalidInput("checkpoint logits must have V columns");
      for (const auto& x : r) logits.push_back(x.get<double>());
    }
    return BigramPolicy(v, std::move(logits));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed checkpoint '" + path.string() + "': " + e.what());
  }
}

}  // namespace prefopt
