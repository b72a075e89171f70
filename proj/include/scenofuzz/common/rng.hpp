// Copyright 2026 The Scenofuzz Authors
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

#ifndef SCENOFUZZ__COMMON__RNG_HPP_
#define SCENOFUZZ__COMMON__RNG_HPP_

#include <cstdint>
#include <random>
#include <string>

namespace scenofuzz
{

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so every draw is
/// derived from raw mt19937_64 output here. The full engine state can be
/// saved to and restored from a string for campaign checkpoints.
class Rng
{
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform01(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller (one value per call).
  double normal();

  std::string save_state() const;
  void load_state(const std::string & state);

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent per-evaluation seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace scenofuzz

#endif  // SCENOFUZZ__COMMON__RNG_HPP_
