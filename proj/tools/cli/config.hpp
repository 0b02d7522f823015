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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "prefopt/ingest.hpp"
#include "prefopt/synth.hpp"
#include "prefopt/trainer.hpp"

namespace prefopt::cli {

inline constexpr const char* kSynthSchema = "prefopt.synth.v1";
inline constexpr const char* kTrainSchema = "prefopt.train.v1";
inline constexpr const char* kSweepSchema = "prefopt.sweep.v1";

/// Environment variable that anchors relative output paths.
inline constexpr const char* kOutputRootEnv = "PREFOPT_OUTPUT_ROOT";

/// Relative paths are taken against $PREFOPT_OUTPUT_ROOT when it is set.
std::filesystem::path resolve_output(const std::filesystem::path& p);

/// Method fields shared by train configs, sweep defaults, and sweep methods.
/// A reference may be given by name or by index; names are resolved once the
/// dataset is known.
struct MethodSpec {
  TrainConfig train;
  std::optional<std::string> reference_name;
  std::optional<std::filesystem::path> init_checkpoint;
  /// Standard deviation of the random initial logits; 0 starts from zeros.
  double init_scale = 0.0;
  std::optional<std::string> name;
};

/// Fills `spec.train.reference` from `reference_name`. Throws ConfigError for
/// an unknown name.
void resolve_reference(MethodSpec& spec, const std::vector<std::string>& ref_names);

struct TrainJob {
  MethodSpec method;
  std::filesystem::path train_path;
  std::filesystem::path val_path;
  std::filesystem::path test_path;
  std::filesystem::path output_dir;
  /// 0 infers the vocabulary from the three splits.
  std::size_t vocab_size = 0;
};

struct SweepData {
  std::optional<SynthConfig> synth;
  std::optional<std::filesystem::path> path;
  std::size_t vocab_size = 0;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;
};

struct SweepSpec {
  SweepData data;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
};

// Loaders throw ConfigError on a missing or wrong "schema", unknown keys, and
// ill-typed values, and InvalidInput when the file cannot be read. Input paths
// inside a config are relative to the config file's directory.
SynthConfig load_synth_config(const std::filesystem::path& path);
TrainJob load_train_job(const std::filesystem::path& path);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// Directory-safe label: dpo runs are named after their reference.
std::string method_label(const MethodSpec& spec, const std::vector<std::string>& ref_names);

}  // namespace prefopt::cli
