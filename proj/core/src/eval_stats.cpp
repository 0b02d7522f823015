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

#include "prefopt/eval_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prefopt/errors.hpp"
#include "prefopt/rng.hpp"

namespace prefopt {

namespace {

AccuracyReport make_report(std::size_t n, std::size_t correct) {
  return {n, correct, static_cast<double>(correct) / static_cast<double>(n)};
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// tau-b of x against y[perm[i]].
double tau_b_permuted(std::span<const double> x, std::span<const double> y, std::span<const std::size_t> perm,
                      double pairs_untied_x, double pairs_untied_y) {
  long long s = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) s += sign(x[i] - x[j]) * sign(y[perm[i]] - y[perm[j]]);
  }
  return static_cast<double>(s) / std::sqrt(pairs_untied_x * pairs_untied_y);
}

double untied_pairs(std::span<const double> v) {
  double c = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) c += (v[i] != v[j]) ? 1.0 : 0.0;
  }
  return c;
}

void check_pair_input(std::span<const double> x, std::span<const double> y, const char* who) {
  if (x.size() != y.size()) throw InvalidInput(std::string(who) + ": inputs differ in length");
  if (x.size() < 2) throw InvalidInput(std::string(who) + ": need n >= 2");
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidInput(std::string(who) + ": non-finite input");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidInput(std::string(who) + ": non-finite input");
  }
}

// Relative slack so tau values that are equal up to rounding count as ">=".
constexpr double kTauSlack = 1e-12;

}  // namespace

AccuracyReport preference_accuracy(const PolicyScorer& policy, std::span<const PreferenceExample> data) {
  if (data.empty()) throw InvalidInput("preference_accuracy: empty dataset");
  std::size_t correct = 0;
  for (const auto& ex : data) {
    const NormalizedLogProbPair p = policy.normalized_pair(ex);
    if (p.pos > p.neg) ++correct;
  }
  return make_report(data.size(), correct);
}

AccuracyReport preference_accuracy(const BigramPolicy& policy, std::span<const PreferenceExample> data) {
  return preference_accuracy(PolicyScorer(policy), data);
}

AccuracyReport reference_accuracy(std::span<const PreferenceExample> data, std::size_t k) {
  if (data.empty()) throw InvalidInput("reference_accuracy: empty dataset");
  std::size_t correct = 0;
  for (const auto& ex : data) {
    const NormalizedLogProbPair p = ex.ref_pair(k);
    if (p.pos > p.neg) ++correct;
  }
  return make_report(data.size(), correct);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair_input(x, y, "kendall_tau");
  const double ux = untied_pairs(x);
  const double uy = untied_pairs(y);
  if (ux == 0.0 || uy == 0.0) {
    throw InvalidInput("kendall_tau: tau-b undefined because an input is constant (all values tied)");
  }
  std::vector<std::size_t> identity(x.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return tau_b_permuted(x, y, identity, ux, uy);
}

RankCorrReport kendall_tau(std::span<const double> x, std::span<const double> y, std::uint64_t seed) {
  RankCorrReport report;
  report.tau = kendall_tau_b(x, y);
  report.n = x.size();
  const double ux = untied_pairs(x);
  const double uy = untied_pairs(y);
  const double threshold = report.tau - kTauSlack;

  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (x.size() <= kExactPermutationLimit) {
    std::size_t hits = 0;
    std::size_t total = 0;
    do {
      ++total;
      if (tau_b_permuted(x, y, perm, ux, uy) >= threshold) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    report.p_value = static_cast<double>(hits) / static_cast<double>(total);
    report.exact = true;
  } else {
    Rng rng = Rng::stream(seed, streams::id(streams::kPermutationTest));
    std::size_t hits = 0;
    for (std::size_t m = 0; m < kMonteCarloPermutations; ++m) {
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
      if (tau_b_permuted(x, y, perm, ux, uy) >= threshold) ++hits;
    }
    report.p_value = static_cast<double>(hits + 1) / static_cast<double>(kMonteCarloPermutations + 1);
    report.exact = false;
  }
  return report;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair_input(x, y, "pearson");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidInput("pearson: correlation undefined for zero variance");
  return sxy / std::sqrt(sxx * syy);
}

SeedAggregate aggregate_seeds(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("aggregate_seeds: no values");
  SeedAggregate out;
  out.n = values.size();
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  if (out.n == 1) {
    out.single_value = true;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
  out.standard_error = sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

}  // namespace prefopt
