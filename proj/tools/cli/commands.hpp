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

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "prefopt/ingest.hpp"

namespace prefopt::cli {

/// Process exit codes. Stable contract.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumerical = 3,
};

struct IngestOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  std::uint64_t seed = 0;
  bool filter = true;
  FilterConfig filter_cfg;
};

// Every command prints the paths it writes to `out` and diagnostics to `err`,
// and returns an ExitCode instead of throwing.

/// Synthetic JSONL plus `<out>.meta.json`.
int cmd_gen(const std::filesystem::path& config, const std::filesystem::path& out_path, std::ostream& out,
            std::ostream& err);

/// Length filter, seeded split, and train/val/test JSONL plus ingest.json.
int cmd_ingest(const IngestOptions& opts, std::ostream& out, std::ostream& err);

/// One run. Exit 3 when the run stopped on a numerical failure; the partial
/// record is written either way.
int cmd_train(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// All (method, seed) cells, then accuracy.csv, aggregate.csv,
/// reference_accuracy.csv, and correlations.json. Failed cells do not fail
/// the sweep.
int cmd_sweep(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Plot-ready CSVs for one run directory, or for every run found below a
/// sweep directory.
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

}  // namespace prefopt::cli
