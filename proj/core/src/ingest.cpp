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

#include "prefopt/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/rng.hpp"

namespace prefopt {

namespace {

using ordered_json = nlohmann::ordered_json;

TokenSeq parse_tokens(const ordered_json& j, const char* field, std::size_t line) {
  if (!j.contains(field)) throw ParseError(line, std::string("missing field '") + field + "'");
  const auto& arr = j.at(field);
  if (!arr.is_array()) throw ParseError(line, std::string("field '") + field + "' is not an array");
  TokenSeq out;
  out.reserve(arr.size());
  for (const auto& t : arr) {
    if (!t.is_number_integer() || t.get<std::int64_t>() < 0 ||
        t.get<std::int64_t>() > std::numeric_limits<TokenId>::max()) {
      throw ParseError(line, std::string("field '") + field + "' holds a non-token value");
    }
    out.push_back(static_cast<TokenId>(t.get<std::int64_t>()));
  }
  return out;
}

double parse_number(const ordered_json& obj, const char* field, std::size_t line) {
  if (!obj.is_object() || !obj.contains(field) || !obj.at(field).is_number()) {
    throw ParseError(line, std::string("reference entry lacks numeric '") + field + "'");
  }
  return obj.at(field).get<double>();
}

}  // namespace

Dataset read_jsonl(std::istream& in) {
  Dataset data;
  std::string text;
  std::size_t line = 0;
  std::size_t record = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    ++record;

    ordered_json j;
    try {
      j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, e.what());
    }
    if (!j.is_object()) throw ParseError(line, "record is not a JSON object");
    for (const auto& [key, _] : j.items()) {
      if (key != "id" && key != "prompt" && key != "chosen" && key != "rejected" && key != "ref_logprobs") {
        throw ParseError(line, "unknown field '" + key + "'");
      }
    }

    PreferenceExample ex;
    if (!j.contains("id") || !j.at("id").is_string()) throw ParseError(line, "missing string field 'id'");
    ex.id = j.at("id").get<std::string>();
    ex.prompt = parse_tokens(j, "prompt", line);
    ex.chosen = parse_tokens(j, "chosen", line);
    ex.rejected = parse_tokens(j, "rejected", line);

    if (!j.contains("ref_logprobs") || !j.at("ref_logprobs").is_object()) {
      throw ParseError(line, "missing object field 'ref_logprobs'");
    }
    const auto& refs = j.at("ref_logprobs");
    if (record == 1) {
      for (const auto& [name, _] : refs.items()) data.ref_names.push_back(name);
    } else {
      if (refs.size() != data.ref_names.size()) {
        throw SchemaError(record, "reference set differs from record 1 (" + std::to_string(refs.size()) +
                                      " vs " + std::to_string(data.ref_names.size()) + " references)");
      }
    }
    ex.ref_logprobs.resize(data.ref_names.size());
    for (std::size_t k = 0; k < data.ref_names.size(); ++k) {
      const std::string& name = data.ref_names[k];
      if (!refs.contains(name)) throw SchemaError(record, "missing reference '" + name + "'");
      const auto& entry = refs.at(name);
      ex.ref_logprobs[k] = {parse_number(entry, "chosen", line), parse_number(entry, "rejected", line)};
    }

    try {
      validate_example(ex);
    } catch (const InvalidInput& e) {
      throw ParseError(line, e.what());
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

Dataset load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return read_jsonl(in);
}

void write_jsonl(std::ostream& out, const Dataset& data) {
  for (const auto& ex : data.examples) {
    if (ex.ref_logprobs.size() != data.ref_names.size()) {
      throw InvalidInput("example '" + ex.id + "' has the wrong number of references");
    }
    ordered_json j;
    j["id"] = ex.id;
    j["prompt"] = ex.prompt;
    j["chosen"] = ex.chosen;
    j["rejected"] = ex.rejected;
    ordered_json refs = ordered_json::object();
    for (std::size_t k = 0; k < data.ref_names.size(); ++k) {
      ordered_json entry;
      entry["chosen"] = ex.ref_logprobs[k].chosen;
      entry["rejected"] = ex.ref_logprobs[k].rejected;
      refs[data.ref_names[k]] = std::move(entry);
    }
    j["ref_logprobs"] = std::move(refs);
    out << j.dump() << '\n';
  }
}

void save_jsonl(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  write_jsonl(out, data);
  if (!out) throw InvalidInput("write failed for '" + path.string() + "'");
}

std::size_t nearest_rank_index(std::size_t n, double pctl) {
  if (!(pctl >= 0.0 && pctl <= 100.0)) throw InvalidInput("percentile must lie in [0, 100]");
  // Small epsilon absorbs binary representation error (e.g. 2.5/100*100).
  const double exact = pctl / 100.0 * static_cast<double>(n);
  const double rank = std::ceil(exact - 1e-9);
  return static_cast<std::size_t>(std::max(0.0, rank));
}

FilterThresholds compute_thresholds(std::span<const PreferenceExample> examples, const FilterConfig& cfg) {
  if (cfg.max_total_len < 1) throw InvalidInput("max_total_len must be >= 1");
  FilterThresholds t;
  t.max_total_len = cfg.max_total_len;

  std::vector<std::size_t> prompts;
  std::vector<std::size_t> responses;
  prompts.reserve(examples.size());
  responses.reserve(2 * examples.size());
  for (const auto& ex : examples) {
    prompts.push_back(ex.prompt.size());
    responses.push_back(ex.chosen.size());
    responses.push_back(ex.rejected.size());
  }
  std::sort(prompts.begin(), prompts.end());
  std::sort(responses.begin(), responses.end());

  if (const std::size_t r = nearest_rank_index(prompts.size(), cfg.prompt_pctl); r > 0) {
    t.prompt_active = true;
    t.min_prompt_exclusive = prompts[r - 1];
  }
  if (const std::size_t r = nearest_rank_index(responses.size(), cfg.response_pctl); r > 0) {
    t.response_active = true;
    t.min_response_exclusive = responses[r - 1];
  }
  return t;
}

std::vector<PreferenceExample> apply_thresholds(std::span<const PreferenceExample> examples,
                                                const FilterThresholds& t) {
  std::vector<PreferenceExample> kept;
  for (const auto& ex : examples) {
    if (t.prompt_active && ex.prompt.size() <= t.min_prompt_exclusive) continue;
    if (t.response_active &&
        (ex.chosen.size() <= t.min_response_exclusive || ex.rejected.size() <= t.min_response_exclusive)) {
      continue;
    }
    if (t.max_total_len != kNoLengthLimit) {
      const std::size_t p = ex.prompt.size();
      if (p + ex.chosen.size() >= t.max_total_len || p + ex.rejected.size() >= t.max_total_len) continue;
    }
    kept.push_back(ex);
  }
  return kept;
}

std::vector<PreferenceExample> apply_filters(std::span<const PreferenceExample> examples, const FilterConfig& cfg) {
  return apply_thresholds(examples, compute_thresholds(examples, cfg));
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng = Rng::stream(seed, streams::id(streams::kSplit));
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

Splits split(std::span<const PreferenceExample> examples, const SplitSpec& spec) {
  const std::size_t need = spec.train_n + spec.val_n + spec.test_n;
  if (need > examples.size()) {
    throw InvalidInput("split sizes " + std::to_string(need) + " exceed dataset size " +
                       std::to_string(examples.size()));
  }
  const auto idx = shuffled_indices(examples.size(), spec.seed);
  Splits out;
  std::size_t pos = 0;
  const auto take = [&](std::vector<PreferenceExample>& dst, std::size_t count) {
    dst.reserve(count);
    for (std::size_t i = 0; i < count; ++i) dst.push_back(examples[idx[pos++]]);
  };
  take(out.train, spec.train_n);
  take(out.val, spec.val_n);
  take(out.test, spec.test_n);
  return out;
}

}  // namespace prefopt
