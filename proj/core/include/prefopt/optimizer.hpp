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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prefopt {

enum class OptimizerKind { kSgd, kAdam };

const char* to_string(OptimizerKind k) noexcept;
OptimizerKind parse_optimizer(const std::string& s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Rescale the gradient to this L2 norm when exceeded. Off by default.
  std::optional<double> clip_norm;
};

/// Adam moments; empty until the first step.
struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;
};

/// SGD: p -= lr * g.  Adam: bias-corrected update with the configured
/// constants. Throws NumericalFailure on a non-finite gradient entry and
/// InvalidInput on a shape mismatch.
void optimizer_step(std::span<double> params, std::span<const double> grad, OptimizerState& state,
                    const OptimizerConfig& cfg);

}  // namespace prefopt
