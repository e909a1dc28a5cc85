/*
 Copyright 2026 The Hion Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hion {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic random source. The uniform and normal transforms are spelled
/// out explicitly (53-bit uniforms, Box-Muller) so that streams are
/// reproducible bit-for-bit independent of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform draw in [a, b).
  double uniform(double a, double b) { return a + (b - a) * canonical(); }

  /// Standard normal draw (Box-Muller, cosine branch, no cached spare).
  double normal() {
    const double u1 = 1.0 - canonical();  // (0, 1], keeps log finite
    const double u2 = canonical();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  double canonical() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;  // [0, 1)
  }

  std::mt19937_64 eng_;
};

/// Independent per-epoch stream so a run is a pure function of (seed, epoch).
inline Rng epoch_rng(std::uint64_t seed, std::uint64_t epoch) {
  return Rng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (epoch + 1)));
}

}  // namespace hion
