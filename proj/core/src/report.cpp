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

#include "prefopt/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace prefopt {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_accuracy_csv(std::ostream& out, std::span<const CellResult> cells) {
  out << "method,seed,status,failure_step,final_val_acc,final_test_acc\n";
  for (const auto& c : cells) {
    out << c.method << ',' << c.seed << ',' << (c.failed ? "failed" : "completed") << ',';
    if (c.failed) {
      out << c.failure_step << ",,\n";
    } else {
      out << ',' << format_double(c.final_val_acc) << ',' << format_double(c.final_test_acc) << '\n';
    }
  }
}

std::vector<MethodAggregate> aggregate_by_method(std::span<const CellResult> cells) {
  std::vector<std::string> order;
  for (const auto& c : cells) {
    if (std::find(order.begin(), order.end(), c.method) == order.end()) order.push_back(c.method);
  }
  std::vector<MethodAggregate> rows;
  for (const auto& m : order) {
    MethodAggregate row;
    row.method = m;
    std::vector<double> test;
    std::vector<double> val;
    for (const auto& c : cells) {
      if (c.method != m) continue;
      if (c.failed) {
        ++row.n_failed;
        continue;
      }
      test.push_back(c.final_test_acc);
      val.push_back(c.final_val_acc);
    }
    if (!test.empty()) {
      row.test = aggregate_seeds(test);
      row.val = aggregate_seeds(val);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, std::span<const MethodAggregate> rows) {
  out << "method,n_completed,n_failed,test_mean,test_se,val_mean,val_se\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.test.n << ',' << r.n_failed << ',';
    if (r.test.n == 0) {
      out << ",,,\n";
      continue;
    }
    out << format_double(r.test.mean) << ',' << format_double(r.test.standard_error) << ','
        << format_double(r.val.mean) << ',' << format_double(r.val.standard_error) << '\n';
  }
}

DeltaSignProportions delta_sign_proportions(std::span<const double> deltas) {
  DeltaSignProportions out;
  out.count = deltas.size();
  if (deltas.empty()) return out;
  std::size_t neg = 0, zero = 0, pos = 0;
  for (double d : deltas) {
    if (d < 0.0) ++neg;
    else if (d > 0.0) ++pos;
    else ++zero;
  }
  const double n = static_cast<double>(deltas.size());
  out.negative = static_cast<double>(neg) / n;
  out.zero = static_cast<double>(zero) / n;
  out.positive = static_cast<double>(pos) / n;
  return out;
}

}  // namespace prefopt
