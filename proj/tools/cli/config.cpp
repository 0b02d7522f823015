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

#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "json.hpp"
#include "prefopt/errors.hpp"

namespace prefopt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads fields from one JSON object and rejects whatever was not consumed.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    if (!obj_.contains(key)) return std::nullopt;
    seen_.insert(key);
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + ": field '" + key + "' has the wrong type");
    }
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  std::size_t read_count(const std::string& key, std::size_t fallback) {
    if (!obj_.contains(key)) return fallback;
    seen_.insert(key);
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where_ + ": field '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void check_schema(ObjectReader& r, const char* expected, const fs::path& path) {
  auto schema = r.get<std::string>("schema");
  if (!schema) throw ConfigError(path.string() + ": missing \"schema\" (expected \"" + expected + "\")");
  if (*schema != expected) {
    throw ConfigError(path.string() + ": unsupported schema \"" + *schema + "\" (expected \"" + expected + "\")");
  }
}

fs::path relative_to(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

SynthConfig parse_synth(const json& obj, const std::string& where) {
  ObjectReader r(obj, where);
  SynthConfig cfg;
  cfg.vocab_size = r.read_count("vocab_size", cfg.vocab_size);
  cfg.prompt_len = r.read_count("prompt_len", cfg.prompt_len);
  cfg.response_len_min = r.read_count("response_len_min", cfg.response_len_min);
  cfg.response_len_max = r.read_count("response_len_max", cfg.response_len_max);
  r.read("gammas", cfg.gammas);
  r.read("temperatures", cfg.temperatures);
  r.read("ref_names", cfg.ref_names);
  if (auto m = r.get<std::string>("label_mode")) cfg.label_mode = parse_label_mode(*m);
  r.read("logit_scale", cfg.logit_scale);
  cfg.num_pairs = r.read_count("num_pairs", cfg.num_pairs);
  if (r.has("seed")) cfg.seed = r.read_count("seed", 0);
  r.finish();
  cfg.validate();
  return cfg;
}

void parse_optimizer_block(const json& obj, OptimizerConfig& opt, const std::string& where) {
  ObjectReader r(obj, where + ".optimizer");
  if (auto k = r.get<std::string>("kind")) opt.kind = parse_optimizer(*k);
  r.read("learning_rate", opt.learning_rate);
  r.read("beta1", opt.adam_beta1);
  r.read("beta2", opt.adam_beta2);
  r.read("epsilon", opt.adam_epsilon);
  if (auto c = r.get<double>("clip_norm")) opt.clip_norm = *c;
  r.finish();
}

// Applies method fields present in `r` on top of `spec`.
void apply_method_fields(ObjectReader& r, MethodSpec& spec, const fs::path& base, const std::string& where,
                         bool allow_seed, bool allow_name) {
  TrainConfig& t = spec.train;
  if (auto s = r.get<std::string>("loss")) t.loss = parse_loss_variant(*s);
  if (r.has("weighting")) {
    const json& w = r.raw("weighting");
    if (w.is_null()) {
      t.weighting.reset();
    } else if (w.is_string()) {
      t.weighting = parse_strategy(w.get<std::string>());
    } else {
      throw ConfigError(where + ": field 'weighting' must be a string or null");
    }
  }
  if (r.has("reference")) {
    const json& ref = r.raw("reference");
    spec.reference_name.reset();
    t.reference.reset();
    if (ref.is_string()) {
      spec.reference_name = ref.get<std::string>();
    } else if (ref.is_number_unsigned()) {
      t.reference = ref.get<std::size_t>();
    } else if (!ref.is_null()) {
      throw ConfigError(where + ": field 'reference' must be a reference name or index");
    }
  }
  r.read("per_example", t.per_example);
  t.batch_size = r.read_count("batch_size", t.batch_size);
  t.epochs = r.read_count("epochs", t.epochs);
  r.read("beta", t.beta);
  r.read("length_normalized", t.length_normalized);
  r.read("original_length_normalized", t.original_length_normalized);
  if (r.has("optimizer")) parse_optimizer_block(r.raw("optimizer"), t.optimizer, where);
  t.eval_every = r.read_count("eval_every", t.eval_every);
  if (allow_seed && r.has("seed")) t.seed = r.read_count("seed", 0);
  r.read("piv", t.piv);
  r.read("subsample_fraction", t.subsample_fraction);
  if (auto p = r.get<std::string>("init_checkpoint")) spec.init_checkpoint = relative_to(base, *p);
  r.read("init_scale", spec.init_scale);
  if (allow_name) {
    if (auto n = r.get<std::string>("name")) spec.name = *n;
  }
  if (!(spec.init_scale >= 0.0) || !std::isfinite(spec.init_scale)) {
    throw ConfigError(where + ": init_scale must be finite and >= 0");
  }
}

}  // namespace

fs::path resolve_output(const fs::path& p) {
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / p;
  return p;
}

void resolve_reference(MethodSpec& spec, const std::vector<std::string>& ref_names) {
  if (!spec.reference_name) return;
  for (std::size_t k = 0; k < ref_names.size(); ++k) {
    if (ref_names[k] == *spec.reference_name) {
      spec.train.reference = k;
      return;
    }
  }
  throw ConfigError("unknown reference '" + *spec.reference_name + "'");
}

SynthConfig load_synth_config(const fs::path& path) {
  json doc = read_json_file(path);
  if (!doc.is_object()) throw ConfigError(path.string() + ": expected an object");
  ObjectReader top(doc, path.string());
  check_schema(top, kSynthSchema, path);
  json body = doc;
  body.erase("schema");
  return parse_synth(body, path.string());
}

TrainJob load_train_job(const fs::path& path) {
  const json doc = read_json_file(path);
  const fs::path base = path.parent_path();
  ObjectReader r(doc, path.string());
  check_schema(r, kTrainSchema, path);
  TrainJob job;
  auto need_path = [&](const char* key) {
    auto v = r.get<std::string>(key);
    if (!v) throw ConfigError(path.string() + ": missing '" + key + "'");
    return *v;
  };
  job.train_path = relative_to(base, need_path("train"));
  job.val_path = relative_to(base, need_path("val"));
  job.test_path = relative_to(base, need_path("test"));
  job.output_dir = resolve_output(need_path("output_dir"));
  job.vocab_size = r.read_count("vocab_size", 0);
  apply_method_fields(r, job.method, base, path.string(), true, false);
  r.finish();
  return job;
}

SweepSpec load_sweep_spec(const fs::path& path) {
  const json doc = read_json_file(path);
  const fs::path base = path.parent_path();
  const std::string where = path.string();
  ObjectReader r(doc, where);
  check_schema(r, kSweepSchema, path);
  SweepSpec spec;

  auto out = r.get<std::string>("output_dir");
  if (!out) throw ConfigError(where + ": missing 'output_dir'");
  spec.output_dir = resolve_output(*out);

  if (!r.has("data")) throw ConfigError(where + ": missing 'data'");
  {
    ObjectReader d(r.raw("data"), where + ".data");
    if (d.has("synth")) spec.data.synth = parse_synth(d.raw("synth"), where + ".data.synth");
    if (auto p = d.get<std::string>("path")) spec.data.path = relative_to(base, *p);
    if (spec.data.synth.has_value() == spec.data.path.has_value()) {
      throw ConfigError(where + ".data: give exactly one of 'synth' and 'path'");
    }
    spec.data.vocab_size = d.read_count("vocab_size", 0);
    if (!d.has("split")) throw ConfigError(where + ".data: missing 'split'");
    ObjectReader s(d.raw("split"), where + ".data.split");
    spec.data.n_train = s.read_count("train", 0);
    spec.data.n_val = s.read_count("val", 0);
    spec.data.n_test = s.read_count("test", 0);
    s.finish();
    d.finish();
  }

  MethodSpec defaults;
  if (r.has("defaults")) {
    ObjectReader d(r.raw("defaults"), where + ".defaults");
    apply_method_fields(d, defaults, base, where + ".defaults", false, false);
    d.finish();
  }
  auto seeds = r.get<std::vector<std::uint64_t>>("seeds");
  if (!seeds || seeds->empty()) throw ConfigError(where + ": 'seeds' must be a non-empty list");
  spec.seeds = *seeds;

  if (!r.has("methods") || !r.raw("methods").is_array() || r.raw("methods").empty()) {
    throw ConfigError(where + ": 'methods' must be a non-empty list");
  }
  std::size_t i = 0;
  for (const json& m : r.raw("methods")) {
    const std::string mwhere = where + ".methods[" + std::to_string(i++) + "]";
    ObjectReader mr(m, mwhere);
    MethodSpec spec_i = defaults;
    apply_method_fields(mr, spec_i, base, mwhere, false, true);
    mr.finish();
    spec.methods.push_back(std::move(spec_i));
  }
  r.finish();
  return spec;
}

std::string method_label(const MethodSpec& spec, const std::vector<std::string>& ref_names) {
  if (spec.name) return *spec.name;
  const TrainConfig& t = spec.train;
  if (t.loss == LossVariant::kDpo) {
    if (spec.reference_name) return "dpo@" + *spec.reference_name;
    if (t.reference && *t.reference < ref_names.size()) return "dpo@" + ref_names[*t.reference];
    return t.method_label();
  }
  return t.method_label();
}

}  // namespace prefopt::cli
