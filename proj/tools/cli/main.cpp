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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace cli = prefopt::cli;

int main(int argc, char** argv) {
  CLI::App app{"prefopt: multi-reference preference optimization on a bigram policy"};
  app.require_subcommand(1);
  app.footer(std::string("Relative output paths resolve against $") + cli::kOutputRootEnv +
             " when set.\nExit codes: 0 success, 2 configuration or I/O error, 3 numerical failure.");

  std::string gen_config, gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic benchmark as JSONL");
  gen->add_option("--config", gen_config, "Synth config (schema prefopt.synth.v1)")->required();
  gen->add_option("--out", gen_out, "Output JSONL path")->required();

  cli::IngestOptions ing;
  std::string ing_input, ing_out;
  bool no_filter = false;
  auto* ingest = app.add_subcommand("ingest", "Validate, length-filter, and split a JSONL dataset");
  ingest->add_option("--input", ing_input, "Input JSONL")->required();
  ingest->add_option("--out-dir", ing_out, "Directory for train/val/test JSONL")->required();
  ingest->add_option("--train", ing.n_train, "Training pairs")->required();
  ingest->add_option("--val", ing.n_val, "Validation pairs")->required();
  ingest->add_option("--test", ing.n_test, "Test pairs")->required();
  ingest->add_option("--seed", ing.seed, "Split seed")->capture_default_str();
  ingest->add_option("--prompt-pctl", ing.filter_cfg.prompt_pctl, "Drop prompts at or below this length percentile")
      ->capture_default_str();
  ingest->add_option("--response-pctl", ing.filter_cfg.response_pctl,
                     "Drop pairs with a response at or below this length percentile")
      ->capture_default_str();
  ingest->add_option("--max-total-len", ing.filter_cfg.max_total_len, "Exclusive bound on prompt+response tokens")
      ->capture_default_str();
  ingest->add_flag("--no-filter", no_filter, "Skip the length filter");

  std::string train_config;
  auto* train = app.add_subcommand("train", "Run one training job (defaults: beta 0.1, adam lr 1e-4, batch 25)");
  train->add_option("--config", train_config, "Train config (schema prefopt.train.v1)")->required();

  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "Run every (method, seed) cell and aggregate");
  sweep->add_option("--config", sweep_config, "Sweep config (schema prefopt.sweep.v1)")->required();

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Write plot-ready CSVs for a run or sweep directory");
  report->add_option("--run-dir", report_dir, "Run directory or sweep output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (*gen) return cli::cmd_gen(gen_config, gen_out, std::cout, std::cerr);
  if (*ingest) {
    ing.input = ing_input;
    ing.out_dir = ing_out;
    ing.filter = !no_filter;
    return cli::cmd_ingest(ing, std::cout, std::cerr);
  }
  if (*train) return cli::cmd_train(train_config, std::cout, std::cerr);
  if (*sweep) return cli::cmd_sweep(sweep_config, std::cout, std::cerr);
  return cli::cmd_report(report_dir, std::cout, std::cerr);
}
