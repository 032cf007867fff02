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

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qcnn {

// Toric lattice of l1 x l2 square cells with periodic boundaries in both
// directions. Qubits sit on edges. Edge coordinates:
//
//   horizontal edge h(r, c): joins vertex (r, c) to vertex (r, c+1)
//   vertical   edge v(r, c): joins vertex (r, c) to vertex (r+1, c)
//
// with r in [0, l2) counting rows and c in [0, l1) counting columns, both
// reduced mod the lattice size. Flat qubit ids are sublattice-major, then
// row-major: h(r, c) -> r*l1 + c, v(r, c) -> l1*l2 + r*l1 + c.
//
// Plaquette operators are X-products over the four edges of a cell;
// vertex operators are Z-products over the four edges meeting at a site.
// A Z error therefore flips the two plaquettes sharing its edge, and an X
// error flips the two vertices.
struct LatticeGeometry {
  int l1 = 0;  // columns of cells
  int l2 = 0;  // rows of cells

  int n_cells() const { return l1 * l2; }
  std::uint32_t n_qubits() const { return std::uint32_t(2 * l1 * l2); }

  int wrap_row(int r) const { return ((r % l2) + l2) % l2; }
  int wrap_col(int c) const { return ((c % l1) + l1) % l1; }

  std::uint32_t horizontal_edge(int r, int c) const {
    return std::uint32_t(wrap_row(r) * l1 + wrap_col(c));
  }
  std::uint32_t vertical_edge(int r, int c) const {
    return std::uint32_t(l1 * l2 + wrap_row(r) * l1 + wrap_col(c));
  }

  bool is_horizontal(std::uint32_t q) const {
    return q < std::uint32_t(l1 * l2);
  }
  // Returns {row, col} of an edge within its sublattice.
  std::array<int, 2> edge_coords(std::uint32_t q) const {
    int i = int(q) % (l1 * l2);
    return {i / l1, i % l1};
  }
};

inline LatticeGeometry build_torus(int l1, int l2) {
  if (l1 < 2 || l2 < 2)
    throw std::invalid_argument("build_torus: lattice sides must be >= 2");
  return LatticeGeometry{l1, l2};
}

enum class StabilizerKind { Plaquette, Vertex };

struct StabilizerId {
  StabilizerKind kind;
  int row = 0;
  int col = 0;
};

// Edges of cell (r, c), order north, south, west, east.
inline std::array<std::uint32_t, 4> plaquette_qubits(
    const LatticeGeometry& g, int r, int c) {
  return {g.horizontal_edge(r, c), g.horizontal_edge(r + 1, c),
          g.vertical_edge(r, c), g.vertical_edge(r, c + 1)};
}

// Edges meeting at site (r, c), order west, east, north, south.
inline std::array<std::uint32_t, 4> vertex_qubits(const LatticeGeometry& g,
                                                  int r, int c) {
  return {g.horizontal_edge(r, c - 1), g.horizontal_edge(r, c),
          g.vertical_edge(r - 1, c), g.vertical_edge(r, c)};
}

inline std::array<std::uint32_t, 4> stabilizer_qubits(
    const LatticeGeometry& g, const StabilizerId& id) {
  return id.kind == StabilizerKind::Plaquette
             ? plaquette_qubits(g, id.row, id.col)
             : vertex_qubits(g, id.row, id.col);
}

// The four minimal non-contractible string operators through the origin
// row/column. Z strings run on dual-lattice cycles (ladders of parallel
// edges) so they overlap every plaquette an even number of times; X strings
// run on direct-lattice cycles and overlap every vertex twice.
struct LogicalOperators {
  std::vector<std::uint32_t> z_row;  // Z on v(0, c) for all c
  std::vector<std::uint32_t> z_col;  // Z on h(r, 0) for all r
  std::vector<std::uint32_t> x_row;  // X on h(0, c) for all c
  std::vector<std::uint32_t> x_col;  // X on v(r, 0) for all r
};

inline LogicalOperators logical_operators(const LatticeGeometry& g) {
  LogicalOperators L;
  for (int c = 0; c < g.l1; ++c) {
    L.z_row.push_back(g.vertical_edge(0, c));
    L.x_row.push_back(g.horizontal_edge(0, c));
  }
  for (int r = 0; r < g.l2; ++r) {
    L.z_col.push_back(g.horizontal_edge(r, 0));
    L.x_col.push_back(g.vertical_edge(r, 0));
  }
  return L;
}

// ---------- pooling schedule ----------

// One pooling step contracts a side-s parity grid (one sublattice) to side
// s/3. Targets are the cells congruent to (1, 1) mod 3; each target reads
// its four grid neighbours (controls) and, per control, the control's three
// remaining neighbours (partners). All reads use pre-layer values. The same
// schedule applies to both sublattice grids.
struct PoolingTarget {
  int row = 0, col = 0;
  std::array<std::array<int, 2>, 4> controls;
  // partners[k] are the neighbours of controls[k] other than the target.
  std::array<std::array<std::array<int, 2>, 3>, 4> partners;
};

struct PoolingLayer {
  int side = 0;  // grid side this layer consumes
  std::vector<PoolingTarget> targets;
};

struct PoolingSchedule {
  int depth = 0;
  std::vector<PoolingLayer> layers;  // layers[l] maps side 3^(depth-l) -> /3
};

inline std::int64_t pow3(int e) {
  std::int64_t v = 1;
  while (e-- > 0) v *= 3;
  return v;
}

// Qubits remaining before layer `layer` of a depth-`depth` network, summed
// over both sublattices: 2 * 3^(2*(depth-layer)).
inline std::int64_t layer_qubit_count(int depth, int layer) {
  if (depth < 1 || layer < 0 || layer > depth)
    throw std::invalid_argument("layer_qubit_count: need 0 <= layer <= depth");
  std::int64_t side = pow3(depth - layer);
  return 2 * side * side;
}

inline PoolingSchedule build_pooling_schedule(int depth) {
  if (depth < 1)
    throw std::invalid_argument("build_pooling_schedule: depth must be >= 1");
  if (depth > 12)
    throw std::invalid_argument("build_pooling_schedule: depth too large");
  PoolingSchedule sched;
  sched.depth = depth;
  for (int l = 0; l < depth; ++l) {
    PoolingLayer layer;
    layer.side = int(pow3(depth - l));
    int s = layer.side;
    auto wrap = [s](int x) { return ((x % s) + s) % s; };
    for (int tr = 1; tr < s; tr += 3) {
      for (int tc = 1; tc < s; tc += 3) {
        PoolingTarget t;
        t.row = tr;
        t.col = tc;
        const int dr[4] = {-1, 1, 0, 0};
        const int dc[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          int cr = wrap(tr + dr[k]), cc = wrap(tc + dc[k]);
          t.controls[k] = {cr, cc};
          int m = 0;
          for (int j = 0; j < 4; ++j) {
            int nr = wrap(cr + dr[j]), nc = wrap(cc + dc[j]);
            if (nr == tr && nc == tc) continue;
            t.partners[k][m++] = {nr, nc};
          }
          if (m != 3)
            throw std::logic_error("build_pooling_schedule: bad neighbourhood");
        }
        layer.targets.push_back(t);
      }
    }
    sched.layers.push_back(std::move(layer));
  }
  return sched;
}

}  // namespace qcnn
