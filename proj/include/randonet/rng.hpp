// Copyright 2026 The RandONet Authors.
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

#ifndef RANDONET_RNG_HPP_
#define RANDONET_RNG_HPP_

#include <cstdint>
#include <random>

namespace randonet {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Platform-independent random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard library distributions are implementation-defined,
/// so every transform is done here:
///   - uniform01: top 53 bits of one engine word times 2^-53, in [0, 1).
///   - uniform(a, b): a + (b - a) * uniform01.
///   - gaussian: Box-Muller cosine branch on two words,
///     sqrt(-2 ln(1 - u1)) * cos(2 pi u2). Every Gaussian consumes exactly
///     two engine words; the sine branch is discarded.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream `stream` of master seed `seed`. Distinct (seed, stream) pairs
  /// give statistically independent generators.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(~stream)));
  }

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian();

  /// Uniform integer in [0, n); n must be positive. Rejection sampling, so
  /// the result is unbiased and fully determined by the engine words.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace randonet

#endif  // RANDONET_RNG_HPP_
