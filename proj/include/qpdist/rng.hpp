// Copyright 2026 The qpdist developers
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
#include <vector>

namespace qpdist {

/// Splittable 64-bit PRNG.
///
/// Every randomized routine in the library takes a seed (or an Rng) as an
/// explicit parameter; there is no global random state.  `split(stream)`
/// derives an independent child generator keyed on (root seed, stream), so a
/// computation can hand out per-sample or per-restart streams whose output
/// does not depend on how many draws the parent has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

  /// Child generator keyed on (this generator's seed, stream).  Independent
  /// of the current draw position.
  Rng split(std::uint64_t stream) const {
    return Rng(mix(seed_ + 0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

  std::uint64_t seed() const { return seed_; }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }

  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(gen_);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// One draw from {0..probs.size()-1} with the given weights (assumed to
  /// sum to ~1; the tail absorbs rounding).
  std::size_t categorical(const std::vector<double>& probs) {
    double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
  }

  /// Multinomial counts for `shots` draws over `probs`, via conditional
  /// binomials (cost O(outcomes), not O(shots)).
  std::vector<long long> multinomial(long long shots,
                                     const std::vector<double>& probs) {
    std::vector<long long> counts(probs.size(), 0);
    long long remaining = shots;
    double mass = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
      double p = probs[i] / mass;
      if (p > 1.0) p = 1.0;
      if (p < 0.0) p = 0.0;
      std::binomial_distribution<long long> bin(remaining, p);
      counts[i] = bin(gen_);
      remaining -= counts[i];
      mass -= probs[i];
      if (mass <= 0.0) break;
    }
    if (!probs.empty()) counts.back() += remaining;
    return counts;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  // SplitMix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace qpdist
