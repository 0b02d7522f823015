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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "prefopt/eval_stats.hpp"
#include "prefopt/ingest.hpp"
#include "prefopt/losses.hpp"
#include "prefopt/synth.hpp"
#include "prefopt/trainer.hpp"

namespace {

using namespace prefopt;

SynthConfig bench_config(std::size_t num_pairs) {
  SynthConfig c;
  c.gammas = {0.0, 0.25, 0.5, 0.75, 1.0};
  c.temperatures = {1.0, 1.0, 1.0, 1.0, 0.25};
  c.num_pairs = num_pairs;
  c.seed = 1;
  return c;
}

const SynthBenchmark& shared_bench() {
  static const SynthBenchmark b = generate(bench_config(1000));
  return b;
}

void BM_HarmonicLogref(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-50.0, -0.1);
  std::vector<double> ell(k);
  for (auto& x : ell) x = u(gen);
  const WeightVector w = WeightVector::uniform(k);
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_logref(w, ell));
}
BENCHMARK(BM_HarmonicLogref)->Arg(2)->Arg(5)->Arg(16);

void BM_LossAndGrad(benchmark::State& state) {
  const auto variant = static_cast<LossVariant>(state.range(0));
  const auto& data = shared_bench().data.examples;
  const std::span<const PreferenceExample> batch(data.data(), 25);
  const auto theta = policy_logprobs(BigramPolicy(16), batch, true);
  const WeightVector w = variant == LossVariant::kDpo ? WeightVector::basis(5, 0) : WeightVector::uniform(5);
  const LossConfig cfg{0.1, variant, true};
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(batch, theta, cfg, w));
  state.SetLabel(to_string(variant));
}
BENCHMARK(BM_LossAndGrad)->DenseRange(0, 3);

void BM_KendallExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(2);
  std::normal_distribution<double> nd;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = nd(gen);
    y[i] = x[i] + nd(gen);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(x, y));
}
BENCHMARK(BM_KendallExact)->Arg(5)->Arg(8);

void BM_TrainEpoch(benchmark::State& state) {
  const auto& b = shared_bench();
  const Splits s = split(b.data.examples, {500, 250, 250, 0});
  TrainConfig c;
  c.loss = LossVariant::kMrpo;
  c.weighting = static_cast<StrategyKind>(state.range(0));
  c.eval_every = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_epoch(BigramPolicy(16), {s.train, s.val, s.test, b.data.ref_names}, c));
  }
  state.SetLabel(to_string(*c.weighting));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.train.size()));
}
BENCHMARK(BM_TrainEpoch)
    ->Arg(static_cast<int>(StrategyKind::kUniform))
    ->Arg(static_cast<int>(StrategyKind::kSwcw))
    ->Arg(static_cast<int>(StrategyKind::kTsw))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
