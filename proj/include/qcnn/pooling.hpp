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
#include <stdexcept>
#include <vector>

#include "qcnn/bits.hpp"
#include "qcnn/grid.hpp"
#include "qcnn/lattice.hpp"

namespace qcnn {

// One pooling step. Every third cell in both directions (offset 1) is a
// target; its bit is updated as
//     t ^= XOR of its 4 neighbors
//     t ^= XOR over (control AND partner) for each control's 3 non-target
//          neighbors,
// with every control/partner read from the pre-layer grid (controls are
// never targets, so this equals sequential gate application). The grid is
// then restricted to the targets, shrinking the side by 3. The first sum
// alone cancels a syndrome pair lying on {target, neighbor}; the second
// cancels the spurious flip the first sum introduces when a pair lies
// entirely inside the neighborhood but misses the target.
inline SyndromeGrid apply_pooling_layer(const SyndromeGrid& grid,
                                        const PoolingSchedule& schedule,
                                        int layer) {
  const int s = grid.side();
  if (layer < 0 || layer >= schedule.depth)
    throw std::invalid_argument("apply_pooling_layer: layer out of range");
  if (s != pow3(schedule.depth - layer))
    throw std::invalid_argument(
        "apply_pooling_layer: grid side does not match schedule layer");
  if (s < 3 || s % 3 != 0)
    throw std::invalid_argument("apply_pooling_layer: side must be a multiple of 3");

  const std::size_t nbits = static_cast<std::size_t>(s);
  const std::size_t wpr = grid.words_per_row();
  SyndromeGrid out(grid.basis(), s / 3);

  // Scratch for the eight row rotations plus the accumulator.
  std::vector<std::uint64_t> buf(9 * wpr, 0);
  std::uint64_t* rot_b_m1 = buf.data() + 0 * wpr;
  std::uint64_t* rot_b_p1 = buf.data() + 1 * wpr;
  std::uint64_t* rot_c_m1 = buf.data() + 2 * wpr;
  std::uint64_t* rot_c_p1 = buf.data() + 3 * wpr;
  std::uint64_t* rot_c_m2 = buf.data() + 4 * wpr;
  std::uint64_t* rot_c_p2 = buf.data() + 5 * wpr;
  std::uint64_t* rot_d_m1 = buf.data() + 6 * wpr;
  std::uint64_t* rot_d_p1 = buf.data() + 7 * wpr;
  std::uint64_t* acc = buf.data() + 8 * wpr;

  for (int tr = 1; tr < s; tr += 3) {
    const std::uint64_t* ra = grid.row((tr - 2 + s) % s);
    const std::uint64_t* rb = grid.row((tr - 1 + s) % s);
    const std::uint64_t* rc = grid.row(tr);
    const std::uint64_t* rd = grid.row((tr + 1) % s);
    const std::uint64_t* re = grid.row((tr + 2) % s);
    bits::gather_offset(rot_b_m1, rb, nbits, -1);
    bits::gather_offset(rot_b_p1, rb, nbits, +1);
    bits::gather_offset(rot_c_m1, rc, nbits, -1);
    bits::gather_offset(rot_c_p1, rc, nbits, +1);
    bits::gather_offset(rot_c_m2, rc, nbits, -2);
    bits::gather_offset(rot_c_p2, rc, nbits, +2);
    bits::gather_offset(rot_d_m1, rd, nbits, -1);
    bits::gather_offset(rot_d_p1, rd, nbits, +1);
    for (std::size_t w = 0; w < wpr; ++w) {
      std::uint64_t north = rb[w], south = rd[w];
      std::uint64_t west = rot_c_m1[w], east = rot_c_p1[w];
      std::uint64_t toff = (north & ra[w]) ^ (north & rot_b_m1[w]) ^
                           (north & rot_b_p1[w]) ^ (south & re[w]) ^
                           (south & rot_d_m1[w]) ^ (south & rot_d_p1[w]) ^
                           (west & rot_c_m2[w]) ^ (west & rot_b_m1[w]) ^
                           (west & rot_d_m1[w]) ^ (east & rot_c_p2[w]) ^
                           (east & rot_b_p1[w]) ^ (east & rot_d_p1[w]);
      acc[w] = rc[w] ^ north ^ south ^ west ^ east ^ toff;
    }
    int out_row = (tr - 1) / 3;
    for (int tc = 1; tc < s; tc += 3)
      if (bits::get(acc, static_cast<std::uint32_t>(tc)))
        out.set(out_row, (tc - 1) / 3, true);
  }
  return out;
}

// QCNN readout of a grid: +1 when every stabilizer bit is clean, -1 when
// all are violated, 0 in expectation for fair-random bits.
inline double layer_output(const SyndromeGrid& grid) {
  double total = static_cast<double>(grid.side()) * grid.side();
  return 2.0 * (static_cast<double>(grid.zeros()) / total) - 1.0;
}

// Per-layer readouts of one pipeline pass: index l in [0, depth] holds the
// output after l pooling steps; `combined` is the per-layer product of the
// two basis readouts.
struct LayerOutputs {
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> combined;
  int depth() const { return static_cast<int>(x.size()) - 1; }
};

inline LayerOutputs run_pipeline(const SyndromeGrid& x_grid,
                                 const SyndromeGrid& z_grid,
                                 const PoolingSchedule& schedule) {
  if (x_grid.basis() != Basis::X || z_grid.basis() != Basis::Z)
    throw std::invalid_argument("run_pipeline: grids must be (X, Z) in order");
  if (x_grid.side() != pow3(schedule.depth) ||
      z_grid.side() != pow3(schedule.depth))
    throw std::invalid_argument("run_pipeline: grid side must be 3^depth");
  LayerOutputs outs;
  SyndromeGrid gx = x_grid, gz = z_grid;
  for (int l = 0;; ++l) {
    outs.x.push_back(layer_output(gx));
    outs.z.push_back(layer_output(gz));
    outs.combined.push_back(outs.x.back() * outs.z.back());
    if (l == schedule.depth) break;
    gx = apply_pooling_layer(gx, schedule, l);
    gz = apply_pooling_layer(gz, schedule, l);
  }
  return outs;
}

// Stabilizer parities of a measurement snapshot. A Z-basis snapshot
// determines every vertex parity (4 surrounding edge bits); an X-basis
// snapshot determines every plaquette parity.
inline SyndromeGrid snapshot_to_grid(const BitVec& bits, Basis basis,
                                     const LatticeGeometry& geom) {
  if (bits.size() != static_cast<std::size_t>(geom.n_qubits()))
    throw std::invalid_argument("snapshot_to_grid: snapshot size mismatch");
  if (geom.l1 != geom.l2)
    throw std::invalid_argument("snapshot_to_grid: grids require a square lattice");
  SyndromeGrid out(basis, geom.l1);
  for (int r = 0; r < geom.l2; ++r)
    for (int c = 0; c < geom.l1; ++c) {
      StabilizerId id{basis == Basis::Z ? StabilizerKind::Vertex
                                        : StabilizerKind::Plaquette,
                      r, c};
      auto qs = stabilizer_qubits(geom, id);
      bool parity = false;
      for (std::uint32_t q : qs) parity ^= bits.get(q);
      out.set(r, c, parity);
    }
  return out;
}

}  // namespace qcnn
