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
#include <random>

namespace prefopt {

/// The project-wide pseudo-random generator.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions below are implemented here rather than taken
/// from <random> because the standard distributions are implementation
/// defined; every draw is therefore identical across toolchains for a given
/// seed.
///
/// Sub-streams are derived as `seed ^ stream_id` (see `Rng::stream`).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) { return Rng(seed ^ stream_id); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer on [0, n); n must be positive. Unbiased (rejection).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape);
  /// Beta(a, b) as Ga / (Ga + Gb).
  double beta(double a, double b);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Stream tags; combined with an index as (tag << 40) | index.
namespace streams {
inline constexpr std::uint64_t kSplit = 0x01;
inline constexpr std::uint64_t kSynthTables = 0x02;
inline constexpr std::uint64_t kSynthExample = 0x03;
inline constexpr std::uint64_t kBanditSelect = 0x04;
inline constexpr std::uint64_t kValSubsample = 0x05;
inline constexpr std::uint64_t kPermutationTest = 0x06;
inline constexpr std::uint64_t kPolicyInit = 0x07;

constexpr std::uint64_t id(std::uint64_t tag, std::uint64_t index = 0) {
  return (tag << 40) | (index & ((std::uint64_t{1} << 40) - 1));
}
}  // namespace streams

}  // namespace prefopt
