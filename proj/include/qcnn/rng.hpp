// Copyright 2026 The qcnn2d authors
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

#include <cmath>
#include <cstdint>
#include <random>

#include "qcnn/bits.hpp"

namespace qcnn {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a stream key from a master seed plus an arbitrary list of indices
// (axis tag, grid point, sample, ...). Also the basis of reproducibility:
// every random decision in a run is drawn from a stream keyed this way, so
// results do not depend on evaluation order or worker count.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t seed, Parts... parts) {
  std::uint64_t k = splitmix64(seed);
  ((k = splitmix64(k ^ std::uint64_t(parts))), ...);
  return k;
}

template <typename... Parts>
std::mt19937_64 make_stream(std::uint64_t seed, Parts... parts) {
  return std::mt19937_64(derive_seed(seed, parts...));
}

// Uniform double in (0, 1). Explicit construction from raw bits; the
// distributions in <random> are implementation-defined and would tie output
// bytes to the standard library version.
inline double uniform_unit(std::mt19937_64& rng) {
  std::uint64_t bits;
  do {
    bits = rng() >> 11;
  } while (bits == 0);
  return double(bits) * 0x1p-53;
}

inline bool bernoulli(std::mt19937_64& rng, double p) {
  return uniform_unit(rng) < p;
}

// Sets each bit of `mask` with probability p, skipping between hits with
// geometric gaps so the cost is O(p * n) instead of O(n).
inline void fill_bernoulli(BitVec& mask, double p, std::mt19937_64& rng) {
  mask.clear();
  std::size_t n = mask.size();
  if (p <= 0.0 || n == 0) return;
  if (p >= 1.0) {
    for (std::size_t i = 0; i < n; ++i) mask.set(i, true);
    return;
  }
  const double denom = std::log1p(-p);
  std::size_t pos = 0;
  while (true) {
    double u = uniform_unit(rng);
    double gap = std::floor(std::log(u) / denom);
    if (gap >= double(n)) return;
    pos += std::size_t(gap);
    if (pos >= n) return;
    mask.set(pos, true);
    ++pos;
  }
}

}  // namespace qcnn
