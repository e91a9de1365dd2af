#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The hsm authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <cstdint>
#include <random>

namespace hsm {

/// splitmix64 finalizer; used to derive statistically independent sub-seeds
/// from (seed, index...) tuples so that parallel workers and re-runs produce
/// identical streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a) {
  return splitmix64(splitmix64(seed) ^ splitmix64(a + 0x51ed270b816a5a1dULL));
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return sub_seed(sub_seed(seed, a), b);
}

using Rng = std::mt19937_64;

/// Uniform draw from the half-open interval (0, upper]; the lower endpoint is
/// excluded because type supports are open at zero.
inline double draw_open_below(Rng& rng, double upper) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return upper * (1.0 - u01(rng));
}

inline double draw_closed(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

}  // namespace hsm
