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

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "qcnn/bits.hpp"

namespace qcnn {

// Which measurement basis a parity grid came from. X-basis grids hold
// plaquette (X-stabilizer) parities, Z-basis grids hold vertex parities.
enum class Basis { X, Z };

inline const char* basis_name(Basis b) { return b == Basis::X ? "X" : "Z"; }

// Square grid of syndrome bits (0 = stabilizer value +1), one per cell,
// rows packed into 64-bit words. Also used for the intermediate grids of
// the pooling pipeline.
class SyndromeGrid {
 public:
  SyndromeGrid() = default;
  SyndromeGrid(Basis basis, int side)
      : basis_(basis),
        side_(side),
        wpr_((side + 63) / 64),
        words_(std::size_t(side) * std::size_t((side + 63) / 64), 0) {
    if (side < 1) throw std::invalid_argument("SyndromeGrid: side must be >= 1");
  }

  Basis basis() const { return basis_; }
  int side() const { return side_; }
  int words_per_row() const { return wpr_; }
  std::int64_t cell_count() const { return std::int64_t(side_) * side_; }

  const std::uint64_t* row(int r) const { return words_.data() + std::size_t(r) * wpr_; }
  std::uint64_t* row(int r) { return words_.data() + std::size_t(r) * wpr_; }

  bool get(int r, int c) const { return bits::get(row(r), std::size_t(c)); }
  void set(int r, int c, bool v) { bits::set(row(r), std::size_t(c), v); }
  void toggle(int r, int c) {
    row(r)[c >> 6] ^= std::uint64_t(1) << (c & 63);
  }

  std::int64_t ones() const {
    std::int64_t n = 0;
    for (std::uint64_t w : words_) n += std::popcount(w);
    return n;
  }
  std::int64_t zeros() const { return cell_count() - ones(); }

  bool operator==(const SyndromeGrid& o) const {
    return basis_ == o.basis_ && side_ == o.side_ && words_ == o.words_;
  }

 private:
  Basis basis_ = Basis::X;
  int side_ = 0;
  int wpr_ = 0;
  std::vector<std::uint64_t> words_;
};

// Grid of i.i.d. fair coin flips, used to calibrate the trivial-phase
// (fully scrambled) endpoint of the pipeline readout.
inline SyndromeGrid random_grid(Basis basis, int side, std::mt19937_64& rng) {
  SyndromeGrid g(basis, side);
  unsigned tail = static_cast<unsigned>(side) & 63u;
  std::uint64_t last_mask =
      tail ? (std::uint64_t(1) << tail) - 1 : ~std::uint64_t(0);
  for (int r = 0; r < side; ++r) {
    std::uint64_t* row = g.row(r);
    for (int w = 0; w < g.words_per_row(); ++w) row[w] = rng();
    row[g.words_per_row() - 1] &= last_mask;
  }
  return g;
}

}  // namespace qcnn
