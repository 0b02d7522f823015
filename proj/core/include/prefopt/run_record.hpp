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
#include <iosfwd>
#include <vector>

#include "prefopt/policy.hpp"
#include "prefopt/trainer.hpp"

namespace prefopt {

// Run directory layout:
//   steps.jsonl   one StepRecord per line
//   summary.json  RunSummary
//   policy.json   final policy checkpoint
//   timing.json   wall-clock seconds (kept apart so the files above are
//                 byte-identical across reruns)

const char* to_string(RunStatus s) noexcept;

void write_steps_jsonl(std::ostream& out, const std::vector<StepRecord>& steps);
std::vector<StepRecord> read_steps_jsonl(std::istream& in);

void write_summary_json(std::ostream& out, const RunSummary& summary);
RunSummary read_summary_json(std::istream& in);

/// Writes steps.jsonl, summary.json, policy.json, and timing.json into `dir`,
/// creating it when needed.
void save_run(const std::filesystem::path& dir, const TrainResult& result);

/// Reads steps.jsonl and summary.json. Throws InvalidInput when either is missing.
RunRecord load_run(const std::filesystem::path& dir);

}  // namespace prefopt
