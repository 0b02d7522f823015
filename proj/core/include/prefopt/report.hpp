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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "prefopt/eval_stats.hpp"

namespace prefopt {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// One (method, seed) cell of a sweep.
struct CellResult {
  std::string method;
  std::uint64_t seed = 0;
  bool failed = false;
  std::size_t failure_step = 0;
  double final_val_acc = 0.0;
  double final_test_acc = 0.0;
};

/// method,seed,status,failure_step,final_val_acc,final_test_acc
void write_accuracy_csv(std::ostream& out, std::span<const CellResult> cells);

struct MethodAggregate {
  std::string method;
  SeedAggregate test;
  SeedAggregate val;
  std::size_t n_failed = 0;
};

/// Groups completed cells by method (first-appearance order); failed cells only
/// increment `n_failed`. Methods with no completed cell have n == 0.
std::vector<MethodAggregate> aggregate_by_method(std::span<const CellResult> cells);

/// method,n_completed,n_failed,test_mean,test_se,val_mean,val_se
void write_aggregate_csv(std::ostream& out, std::span<const MethodAggregate> rows);

struct DeltaSignProportions {
  std::size_t count = 0;
  double negative = 0.0;
  double zero = 0.0;
  double positive = 0.0;
};

/// Share of negative, exactly-zero, and positive accuracy changes.
/// All shares are 0 when `deltas` is empty.
DeltaSignProportions delta_sign_proportions(std::span<const double> deltas);

}  // namespace prefopt
