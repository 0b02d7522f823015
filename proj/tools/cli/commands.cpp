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

#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "prefopt/errors.hpp"
#include "prefopt/eval_stats.hpp"
#include "prefopt/report.hpp"
#include "prefopt/run_record.hpp"

namespace prefopt::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    err << "malformed file: " << e.what() << "\n";
  }
  return kExitUsage;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw InvalidInput("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const ordered_json& doc) { write_file(path, doc.dump(2) + "\n"); }

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

Dataset load_split(const fs::path& path) {
  if (!fs::exists(path)) throw InvalidInput("dataset file '" + path.string() + "' does not exist");
  return load_jsonl(path);
}

BigramPolicy initial_policy(const MethodSpec& spec, std::size_t vocab, std::uint64_t seed) {
  if (spec.init_checkpoint) {
    BigramPolicy p = load_checkpoint(*spec.init_checkpoint);
    if (p.vocab_size() != vocab) {
      throw ConfigError("init checkpoint has vocabulary " + std::to_string(p.vocab_size()) + ", data needs " +
                        std::to_string(vocab));
    }
    return p;
  }
  return random_policy(vocab, spec.init_scale, seed);
}

std::string dir_safe(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '+' ||
                    c == '@';
    if (!ok) c = '_';
  }
  return out;
}

std::vector<double> arm_posterior_means(const RunSummary& s) {
  std::vector<double> mu;
  for (const auto& arm : s.bandit_arms) mu.push_back(arm.alpha / (arm.alpha + arm.beta));
  return mu;
}

// ---- report ---------------------------------------------------------------

std::string csv_opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_header(const std::vector<std::string>& names) {
  std::string h = "step";
  for (const auto& n : names) h += "," + n;
  return h + "\n";
}

std::vector<std::string> column_names(const RunRecord& rec, std::size_t k) {
  if (rec.summary.ref_names.size() == k) return rec.summary.ref_names;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("ref" + std::to_string(i));
  return names;
}

void report_run(const fs::path& dir, std::ostream& out) {
  const RunRecord rec = load_run(dir);
  const auto& steps = rec.steps;

  std::string acc = "step,val_acc,test_acc\n";
  for (const auto& s : steps) {
    if (!s.val_acc && !s.test_acc) continue;
    acc += std::to_string(s.step) + "," + csv_opt(s.val_acc) + "," + csv_opt(s.test_acc) + "\n";
  }
  const std::size_t k = steps.empty() ? rec.summary.ref_names.size() : steps.front().weights.size();
  const auto names = column_names(rec, k);
  std::string alpha = csv_header(names);
  for (const auto& s : steps) {
    alpha += std::to_string(s.step);
    for (double a : s.weights) alpha += "," + format_double(a);
    alpha += "\n";
  }

  std::vector<double> deltas;
  std::string source;
  const bool bandit = std::any_of(steps.begin(), steps.end(), [](const StepRecord& s) { return s.reward.has_value(); });
  if (bandit) {
    source = "reward";
    for (const auto& s : steps) {
      if (s.reward) deltas.push_back(s.reward->acc_after - s.reward->acc_before);
    }
  } else {
    source = "val_acc";
    std::optional<double> prev = rec.summary.initial_val_acc;
    for (const auto& s : steps) {
      if (!s.val_acc) continue;
      if (prev) deltas.push_back(*s.val_acc - *prev);
      prev = s.val_acc;
    }
  }
  const DeltaSignProportions p = delta_sign_proportions(deltas);
  const std::string delta = "source,count,negative,zero,positive\n" + source + "," + std::to_string(p.count) + "," +
                            format_double(p.negative) + "," + format_double(p.zero) + "," +
                            format_double(p.positive) + "\n";

  write_file(dir / "accuracy_by_step.csv", acc);
  write_file(dir / "alpha_by_step.csv", alpha);
  write_file(dir / "delta_sign.csv", delta);
  for (const char* name : {"accuracy_by_step.csv", "alpha_by_step.csv", "delta_sign.csv"}) {
    out << (dir / name).string() << "\n";
  }
  if (bandit) {
    const std::size_t arms = steps.front().arm_means.size();
    std::string mu = csv_header(column_names(rec, arms));
    for (const auto& s : steps) {
      mu += std::to_string(s.step);
      for (double m : s.arm_means) mu += "," + format_double(m);
      mu += "\n";
    }
    write_file(dir / "mu_by_step.csv", mu);
    out << (dir / "mu_by_step.csv").string() << "\n";
  }
}

std::vector<fs::path> find_runs(const fs::path& root) {
  std::vector<fs::path> runs;
  if (fs::exists(root / "summary.json")) {
    runs.push_back(root);
    return runs;
  }
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "summary.json") runs.push_back(entry.path().parent_path());
  }
  std::sort(runs.begin(), runs.end());
  return runs;
}

// ---- sweep correlations ---------------------------------------------------

struct CellOutcome {
  std::string label;
  const MethodSpec* spec = nullptr;
  std::uint64_t seed = 0;
  RunRecord record;
};

ordered_json tau_json(std::span<const double> a, std::span<const double> b, std::uint64_t seed) {
  ordered_json j;
  j["seed"] = seed;
  try {
    const RankCorrReport r = kendall_tau(a, b, seed);
    j["tau"] = r.tau;
    j["p_value"] = r.p_value;
    j["exact"] = r.exact;
  } catch (const InvalidInput& e) {
    j["tau"] = nullptr;
    j["p_value"] = nullptr;
    j["error"] = e.what();
  }
  return j;
}

// Adds mean/SE over the finite entries of `field` in `per_seed`.
ordered_json summarize(ordered_json per_seed, const char* field) {
  std::vector<double> values;
  std::vector<double> ps;
  for (const auto& row : per_seed) {
    if (row[field].is_number()) values.push_back(row[field].get<double>());
    if (row.contains("p_value") && row["p_value"].is_number()) ps.push_back(row["p_value"].get<double>());
  }
  ordered_json j;
  j["per_seed"] = std::move(per_seed);
  j["n"] = values.size();
  if (values.empty()) {
    j["mean"] = nullptr;
    j["standard_error"] = nullptr;
  } else {
    const SeedAggregate agg = aggregate_seeds(values);
    j["mean"] = agg.mean;
    j["standard_error"] = agg.standard_error;
  }
  if (!ps.empty()) j["mean_p_value"] = aggregate_seeds(ps).mean;
  return j;
}

ordered_json correlations(const std::vector<CellOutcome>& cells, const std::vector<std::string>& ref_names,
                          const std::map<std::uint64_t, std::vector<double>>& ref_acc,
                          const std::vector<std::string>& labels) {
  const std::size_t k = ref_names.size();
  // Single-reference DPO accuracy per seed, complete only when every reference ran.
  std::map<std::uint64_t, std::vector<double>> single;
  {
    std::map<std::uint64_t, std::map<std::size_t, double>> partial;
    for (const auto& c : cells) {
      const TrainConfig& t = c.spec->train;
      if (t.loss != LossVariant::kDpo || c.record.summary.status != RunStatus::kCompleted) continue;
      if (!c.record.summary.final_test_acc) continue;
      partial[c.seed][*t.reference] = *c.record.summary.final_test_acc;
    }
    for (const auto& [seed, by_ref] : partial) {
      if (by_ref.size() != k) continue;
      std::vector<double> v;
      for (const auto& [_, a] : by_ref) v.push_back(a);
      single[seed] = std::move(v);
    }
  }

  ordered_json doc;
  doc["schema"] = "prefopt.correlations.v1";
  doc["reference_names"] = ref_names;
  ordered_json ra = ordered_json::array();
  for (const auto& [seed, v] : ref_acc) ra.push_back({{"seed", seed}, {"values", v}});
  doc["reference_test_accuracy"] = std::move(ra);
  ordered_json sd = ordered_json::array();
  for (const auto& [seed, v] : single) sd.push_back({{"seed", seed}, {"values", v}});
  doc["single_dpo_test_accuracy"] = std::move(sd);

  ordered_json offline = ordered_json::array();
  ordered_json tsw = ordered_json::array();
  for (const auto& label : labels) {
    ordered_json vs_ref = ordered_json::array();
    ordered_json vs_single = ordered_json::array();
    std::optional<StrategyKind> kind;
    for (const auto& c : cells) {
      if (c.label != label) continue;
      kind = c.spec->train.weighting;
      std::vector<double> w;
      if (kind && is_offline(*kind) && *kind != StrategyKind::kUniform && !c.record.steps.empty()) {
        w = c.record.steps.front().weights;
      } else if (kind == StrategyKind::kTsw && c.record.summary.status == RunStatus::kCompleted) {
        w = arm_posterior_means(c.record.summary);
      }
      if (w.size() != k) continue;
      vs_ref.push_back(tau_json(w, ref_acc.at(c.seed), c.seed));
      if (auto it = single.find(c.seed); it != single.end()) vs_single.push_back(tau_json(w, it->second, c.seed));
    }
    if (!kind) continue;
    if (*kind == StrategyKind::kVdw || *kind == StrategyKind::kVaw) {
      offline.push_back({{"method", label},
                         {"alpha_vs_ref_acc", summarize(std::move(vs_ref), "tau")},
                         {"alpha_vs_single_dpo_acc", summarize(std::move(vs_single), "tau")}});
    } else if (*kind == StrategyKind::kTsw) {
      tsw.push_back({{"method", label},
                     {"mu_vs_single_dpo_acc", summarize(std::move(vs_single), "tau")},
                     {"mu_vs_ref_acc", summarize(std::move(vs_ref), "tau")}});
    }
  }
  doc["offline"] = std::move(offline);
  doc["tsw"] = std::move(tsw);

  ordered_json pear = ordered_json::array();
  for (const auto& [seed, v] : single) {
    ordered_json row{{"seed", seed}};
    try {
      row["pearson"] = pearson(ref_acc.at(seed), v);
    } catch (const InvalidInput& e) {
      row["pearson"] = nullptr;
      row["error"] = e.what();
    }
    pear.push_back(std::move(row));
  }
  doc["ref_acc_vs_single_dpo_acc"] = summarize(std::move(pear), "pearson");
  return doc;
}

std::size_t vocab_for(std::size_t declared, std::initializer_list<std::span<const PreferenceExample>> parts) {
  if (declared > 0) return declared;
  std::size_t v = 0;
  for (auto p : parts) v = std::max(v, infer_vocab_size(p));
  if (v == 0) throw InvalidInput("cannot infer a vocabulary from empty data");
  return v;
}

}  // namespace

int cmd_gen(const fs::path& config, const fs::path& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SynthConfig cfg = load_synth_config(config);
    const SynthBenchmark bench = generate(cfg);
    const fs::path path = resolve_output(out_path);
    std::ostringstream body;
    write_jsonl(body, bench.data);
    write_file(path, body.str());

    ordered_json meta;
    meta["schema"] = "prefopt.synth.meta.v1";
    meta["num_pairs"] = bench.data.examples.size();
    meta["vocab_size"] = cfg.vocab_size;
    meta["ref_names"] = bench.data.ref_names;
    meta["gammas"] = cfg.gammas;
    meta["temperatures"] = cfg.temperatures;
    meta["label_mode"] = to_string(cfg.label_mode);
    meta["logit_scale"] = cfg.logit_scale;
    meta["seed"] = cfg.seed;
    meta["truth_checksums"] = {{"good", hex64(bench.truth.good.checksum())}, {"bad", hex64(bench.truth.bad.checksum())}};
    std::vector<double> acc;
    for (std::size_t k = 0; k < cfg.num_refs(); ++k) acc.push_back(reference_accuracy(bench.data.examples, k).accuracy);
    meta["reference_accuracy"] = acc;
    fs::path meta_path = path;
    meta_path += ".meta.json";
    write_json(meta_path, meta);

    out << "generated " << bench.data.examples.size() << " pairs over " << cfg.num_refs() << " references\n"
        << path.string() << "\n"
        << meta_path.string() << "\n";
    return kExitOk;
  });
}

int cmd_ingest(const IngestOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Dataset data = load_split(opts.input);
    std::vector<PreferenceExample> kept = data.examples;
    FilterThresholds t;
    if (opts.filter) {
      t = compute_thresholds(data.examples, opts.filter_cfg);
      kept = apply_thresholds(data.examples, t);
    }
    const std::size_t wanted = opts.n_train + opts.n_val + opts.n_test;
    if (opts.filter && kept.size() < wanted) {
      throw InvalidInput("length filter kept " + std::to_string(kept.size()) + " of " +
                         std::to_string(data.examples.size()) + " pairs, fewer than the " + std::to_string(wanted) +
                         " requested");
    }
    const Splits s = split(kept, {opts.n_train, opts.n_val, opts.n_test, opts.seed});
    const fs::path dir = resolve_output(opts.out_dir);
    const std::pair<const char*, const std::vector<PreferenceExample>*> parts[] = {
        {"train.jsonl", &s.train}, {"val.jsonl", &s.val}, {"test.jsonl", &s.test}};
    for (const auto& [name, part] : parts) {
      std::ostringstream body;
      write_jsonl(body, Dataset{data.ref_names, *part, 0});
      write_file(dir / name, body.str());
    }

    ordered_json manifest;
    manifest["schema"] = "prefopt.ingest.v1";
    manifest["input"] = opts.input.string();
    manifest["num_input"] = data.examples.size();
    manifest["num_after_filter"] = kept.size();
    manifest["ref_names"] = data.ref_names;
    ordered_json f;
    f["enabled"] = opts.filter;
    if (opts.filter) {
      f["prompt_pctl"] = opts.filter_cfg.prompt_pctl;
      f["response_pctl"] = opts.filter_cfg.response_pctl;
      f["max_total_len"] = opts.filter_cfg.max_total_len == kNoLengthLimit ? ordered_json(nullptr)
                                                                           : ordered_json(opts.filter_cfg.max_total_len);
      f["min_prompt_exclusive"] = t.prompt_active ? ordered_json(t.min_prompt_exclusive) : ordered_json(nullptr);
      f["min_response_exclusive"] = t.response_active ? ordered_json(t.min_response_exclusive) : ordered_json(nullptr);
    }
    manifest["filter"] = std::move(f);
    manifest["split"] = {{"seed", opts.seed}, {"train", s.train.size()}, {"val", s.val.size()}, {"test", s.test.size()}};
    write_json(dir / "ingest.json", manifest);

    out << "kept " << kept.size() << " of " << data.examples.size() << " pairs\n";
    for (const char* name : {"train.jsonl", "val.jsonl", "test.jsonl", "ingest.json"}) out << (dir / name).string() << "\n";
    return kExitOk;
  });
}

int cmd_train(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    TrainJob job = load_train_job(config);
    const Dataset train = load_split(job.train_path);
    const Dataset val = load_split(job.val_path);
    const Dataset test = load_split(job.test_path);
    for (const Dataset* d : {&val, &test}) {
      if (!d->examples.empty() && !train.examples.empty() && d->ref_names != train.ref_names) {
        throw ConfigError("train/val/test files disagree on the reference set");
      }
    }
    resolve_reference(job.method, train.ref_names);
    job.method.train.validate(train.ref_names.size());
    const std::size_t vocab = vocab_for(job.vocab_size, {train.examples, val.examples, test.examples});
    BigramPolicy init = initial_policy(job.method, vocab, job.method.train.seed);

    const TrainData data{train.examples, val.examples, test.examples, train.ref_names};
    const TrainResult result = train_epoch(std::move(init), data, job.method.train);
    save_run(job.output_dir, result);
    for (const char* name : {"steps.jsonl", "summary.json", "policy.json", "timing.json"}) {
      out << (job.output_dir / name).string() << "\n";
    }
    const RunSummary& s = result.record.summary;
    if (s.status == RunStatus::kNumericalFailure) {
      err << "numerical failure at step " << *s.failure_step << ": " << s.failure_message << "\n";
      return kExitNumerical;
    }
    if (s.final_test_acc) out << "final test accuracy " << format_double(*s.final_test_acc) << "\n";
    return kExitOk;
  });
}

int cmd_sweep(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SweepSpec spec = load_sweep_spec(config);
    Dataset data;
    std::size_t vocab = spec.data.vocab_size;
    if (spec.data.synth) {
      data = generate(*spec.data.synth).data;
      if (vocab == 0) vocab = spec.data.synth->vocab_size;
    } else {
      data = load_split(*spec.data.path);
    }
    vocab = vocab_for(vocab, {data.examples});
    const auto& refs = data.ref_names;

    std::vector<std::string> labels;
    for (auto& m : spec.methods) {
      resolve_reference(m, refs);
      m.train.validate(refs.size());
      const std::string label = method_label(m, refs);
      if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
        throw ConfigError("two sweep methods share the label '" + label + "'; set 'name' to tell them apart");
      }
      labels.push_back(label);
    }

    const fs::path root = spec.output_dir;
    std::vector<CellOutcome> cells;
    std::vector<CellResult> results;
    std::map<std::uint64_t, std::vector<double>> ref_acc;
    for (std::uint64_t seed : spec.seeds) {
      const Splits s = split(data.examples, {spec.data.n_train, spec.data.n_val, spec.data.n_test, seed});
      auto& acc = ref_acc[seed];
      for (std::size_t k = 0; k < refs.size(); ++k) {
        acc.push_back(s.test.empty() ? 0.0 : reference_accuracy(s.test, k).accuracy);
      }
      const TrainData td{s.train, s.val, s.test, refs};
      for (std::size_t i = 0; i < spec.methods.size(); ++i) {
        TrainConfig cfg = spec.methods[i].train;
        cfg.seed = seed;
        TrainResult r = train_epoch(initial_policy(spec.methods[i], vocab, seed), td, cfg);
        const fs::path dir = root / "cells" / dir_safe(labels[i]) / ("seed-" + std::to_string(seed));
        save_run(dir, r);
        report_run(dir, out);

        const RunSummary& sum = r.record.summary;
        CellResult cr;
        cr.method = labels[i];
        cr.seed = seed;
        cr.failed = sum.status == RunStatus::kNumericalFailure;
        cr.failure_step = sum.failure_step.value_or(0);
        cr.final_val_acc = sum.final_val_acc.value_or(0.0);
        cr.final_test_acc = sum.final_test_acc.value_or(0.0);
        if (cr.failed) err << "cell " << labels[i] << " seed " << seed << " failed: " << sum.failure_message << "\n";
        results.push_back(cr);
        cells.push_back({labels[i], &spec.methods[i], seed, std::move(r.record)});
      }
    }

    std::ostringstream acc_csv, agg_csv, ref_csv;
    write_accuracy_csv(acc_csv, results);
    const auto agg = aggregate_by_method(results);
    write_aggregate_csv(agg_csv, agg);
    ref_csv << "seed";
    for (const auto& n : refs) ref_csv << "," << n;
    ref_csv << "\n";
    for (const auto& [seed, v] : ref_acc) {
      ref_csv << seed;
      for (double a : v) ref_csv << "," << format_double(a);
      ref_csv << "\n";
    }
    write_file(root / "accuracy.csv", acc_csv.str());
    write_file(root / "aggregate.csv", agg_csv.str());
    write_file(root / "reference_accuracy.csv", ref_csv.str());
    write_json(root / "correlations.json", correlations(cells, refs, ref_acc, labels));
    for (const char* name : {"accuracy.csv", "aggregate.csv", "reference_accuracy.csv", "correlations.json"}) {
      out << (root / name).string() << "\n";
    }
    return kExitOk;
  });
}

int cmd_report(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path dir = resolve_output(run_dir);
    if (!fs::is_directory(dir)) throw InvalidInput("run directory '" + dir.string() + "' does not exist");
    const auto runs = find_runs(dir);
    if (runs.empty()) throw InvalidInput("no run records under '" + dir.string() + "'");
    for (const auto& r : runs) report_run(r, out);
    return kExitOk;
  });
}

}  // namespace prefopt::cli
