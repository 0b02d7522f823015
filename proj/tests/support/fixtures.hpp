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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "prefopt/data_model.hpp"
#include "prefopt/ingest.hpp"
#include "prefopt/synth.hpp"

namespace prefopt::testing {

inline TokenSeq random_tokens(std::mt19937_64& gen, std::size_t vocab, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<TokenId> tok(0, static_cast<TokenId>(vocab - 1));
  TokenSeq s(len(gen));
  for (auto& t : s) t = tok(gen);
  return s;
}

/// Valid example with K references and per-reference sums drawn from
/// length * U(-6, -0.1).
inline PreferenceExample random_example(std::mt19937_64& gen, std::size_t k, std::size_t vocab = 8,
                                        std::string id = "ex") {
  PreferenceExample ex;
  ex.id = std::move(id);
  ex.prompt = random_tokens(gen, vocab, 0, 4);
  do {
    ex.chosen = random_tokens(gen, vocab, 1, 6);
    ex.rejected = random_tokens(gen, vocab, 1, 6);
  } while (ex.chosen == ex.rejected);
  std::uniform_real_distribution<double> per_tok(-6.0, -0.1);
  for (std::size_t j = 0; j < k; ++j) {
    ex.ref_logprobs.push_back({per_tok(gen) * static_cast<double>(ex.chosen.size()),
                               per_tok(gen) * static_cast<double>(ex.rejected.size())});
  }
  return ex;
}

inline std::vector<PreferenceExample> random_examples(std::mt19937_64& gen, std::size_t n, std::size_t k,
                                                      std::size_t vocab = 8) {
  std::vector<PreferenceExample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_example(gen, k, vocab, "ex-" + std::to_string(i)));
  return out;
}

/// Example whose normalized reference log-probs are exactly the given pairs
/// (responses of length 1).
inline PreferenceExample example_with_refs(const std::vector<NormalizedLogProbPair>& refs, std::string id = "ex") {
  PreferenceExample ex;
  ex.id = std::move(id);
  ex.chosen = {1};
  ex.rejected = {2};
  for (const auto& r : refs) ex.ref_logprobs.push_back({r.pos, r.neg});
  return ex;
}

/// The K=5 synthetic benchmark used by the desk-scale reproductions: one
/// perfect reference, three mixtures, and an overconfident-wrong arm.
inline SynthConfig five_reference_benchmark(std::uint64_t seed, std::size_t num_pairs) {
  SynthConfig c;
  c.gammas = {0.0, 0.25, 0.5, 0.75, 1.0};
  c.temperatures = {1.0, 1.0, 1.0, 1.0, 0.25};
  c.num_pairs = num_pairs;
  c.seed = seed;
  return c;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("prefopt-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace prefopt::testing
