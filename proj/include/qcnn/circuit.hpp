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
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcnn/lattice.hpp"

namespace qcnn {

enum class OpKind : std::uint8_t { H, CNOT, SWAP, RESET };

// a is the sole qubit for H/RESET, the control for CNOT, first leg for SWAP.
struct CircuitOp {
  OpKind kind;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

struct GateSequence {
  std::uint32_t n_qubits = 0;
  std::vector<CircuitOp> ops;

  void h(std::uint32_t q) { ops.push_back({OpKind::H, q, 0}); }
  void cnot(std::uint32_t c, std::uint32_t t) {
    ops.push_back({OpKind::CNOT, c, t});
  }
  void swap(std::uint32_t a, std::uint32_t b) {
    ops.push_back({OpKind::SWAP, a, b});
  }
  void reset(std::uint32_t q) { ops.push_back({OpKind::RESET, q, 0}); }
  void append(const GateSequence& o) {
    ops.insert(ops.end(), o.ops.begin(), o.ops.end());
  }
};

// Reverses a unitary sequence. Every supported unitary gate is its own
// inverse, so reversal suffices. Sequences containing resets are not
// invertible and are rejected.
inline GateSequence invert_sequence(const GateSequence& seq) {
  GateSequence inv;
  inv.n_qubits = seq.n_qubits;
  inv.ops.reserve(seq.ops.size());
  for (auto it = seq.ops.rbegin(); it != seq.ops.rend(); ++it) {
    if (it->kind == OpKind::RESET)
      throw std::invalid_argument("invert_sequence: sequence contains a reset");
    inv.ops.push_back(*it);
  }
  return inv;
}

inline std::string to_text(const GateSequence& seq) {
  std::ostringstream os;
  for (const CircuitOp& op : seq.ops) {
    switch (op.kind) {
      case OpKind::H:     os << "H " << op.a << '\n'; break;
      case OpKind::CNOT:  os << "CNOT " << op.a << ' ' << op.b << '\n'; break;
      case OpKind::SWAP:  os << "SWAP " << op.a << ' ' << op.b << '\n'; break;
      case OpKind::RESET: os << "RESET " << op.a << '\n'; break;
    }
  }
  return os.str();
}

// Ground-state preparation from |0...0>. Column by column, each plaquette
// puts a fresh representative qubit into |+> and fans it out with CNOTs to
// the other three edges of the cell. Representatives: the right vertical
// edge for every column except the last, the lower horizontal edge for the
// last column. The representative must not have been touched by an earlier
// plaquette; with this choice that holds for every cell except (l2-1, l1-1),
// whose stabilizer is the product of all the others and needs no gates.
inline GateSequence build_prep_circuit(const LatticeGeometry& g) {
  if (g.l1 < 3 || g.l2 < 3)
    throw std::invalid_argument("build_prep_circuit: lattice sides must be >= 3");
  GateSequence seq;
  seq.n_qubits = g.n_qubits();
  for (int c = 0; c + 1 < g.l1; ++c) {
    for (int r = 0; r < g.l2; ++r) {
      std::uint32_t rep = g.vertical_edge(r, c + 1);
      seq.h(rep);
      seq.cnot(rep, g.horizontal_edge(r, c));      // north
      seq.cnot(rep, g.vertical_edge(r, c));        // west
      seq.cnot(rep, g.horizontal_edge(r + 1, c));  // south
    }
  }
  for (int r = 0; r + 1 < g.l2; ++r) {
    std::uint32_t rep = g.horizontal_edge(r + 1, g.l1 - 1);
    seq.h(rep);
    seq.cnot(rep, g.horizontal_edge(r, g.l1 - 1));  // north
    seq.cnot(rep, g.vertical_edge(r, g.l1 - 1));    // west
    seq.cnot(rep, g.vertical_edge(r, 0));           // east, wraps
  }
  return seq;
}

// Measurement carrier for the plaquette at cell (r, c) after the
// convolution: the vertical edge to the cell's right.
inline std::uint32_t designated_plaquette_qubit(const LatticeGeometry& g,
                                                int r, int c) {
  return g.vertical_edge(r, c + 1);
}

// Measurement carrier for the vertex at site (r, c): the horizontal edge to
// the site's left.
inline std::uint32_t designated_vertex_qubit(const LatticeGeometry& g, int r,
                                             int c) {
  return g.horizontal_edge(r, c - 1);
}

// Convolution layer. Maps every plaquette parity onto a single vertical
// edge and every vertex parity onto a single horizontal edge, so that a
// final Z-basis measurement reads out the full syndrome, and erases the
// logical state. Stages:
//
//   1. Inverse preparation. Plaquette parities land on the representative
//      qubits: Z on v(r, c+1) for bulk cells, Z on h(r+1, l1-1) for the
//      last column. Vertex parities become horizontal-edge Z pairs
//      {h(r, c-1), h(r, c)} in the bulk; the wrap-around vertices (r, 0)
//      additionally involve the column-0 vertical edges, which at this
//      point hold the row Wilson-loop parities.
//   2. Fold row 0 of the horizontal sublattice left-to-right, then add the
//      h(0, l1-1) bit (the column Wilson-loop parity, needed by the row-0
//      last-column vertex) into h(0, l1-2). Row 0 is handled before the
//      boundary swaps because stage 4 consumes h(r, 0) values that the
//      fold would overwrite in other rows.
//   3. Cyclically rotate the horizontal column l1-1 into the vertical
//      column 0 with swaps across the periodic edge. This parks the
//      last-column plaquette parities on their designated vertical edges
//      and exposes the row Wilson-loop bits on horizontal edges.
//   4. Assemble the wrap-column vertex parities: for each row r >= 1,
//      h(r, l1-1) ^= h(r, 0) and h(r, l1-1) ^= h(r+1 mod l2, l1-1).
//   5. Fold the remaining horizontal rows left-to-right: h(r, c) ^=
//      h(r, c+1), building the bulk vertex pairs in place.
//   6. Reset the two corner carriers (they hold the two measurable logical
//      string parities, which the layer must forget) and rebuild them as
//      the parity of all other carriers of their sublattice, which equals
//      the one plaquette / vertex parity not yet mapped anywhere.
//
// All stage 2-5 CNOTs are controlled and targeted on horizontal-sublattice
// qubits, so they commute with the plaquette carriers placed by stage 1.
inline GateSequence build_convolution(const LatticeGeometry& g) {
  if (g.l1 < 3 || g.l2 < 3)
    throw std::invalid_argument("build_convolution: lattice sides must be >= 3");
  GateSequence seq = invert_sequence(build_prep_circuit(g));
  seq.n_qubits = g.n_qubits();

  // Stage 2: row-0 fold, then the column-loop parity injection.
  for (int c = 0; c + 2 < g.l1; ++c)
    seq.cnot(g.horizontal_edge(0, c + 1), g.horizontal_edge(0, c));
  seq.cnot(g.horizontal_edge(0, g.l1 - 1), g.horizontal_edge(0, g.l1 - 2));

  // Stage 3: rotate across the periodic edge.
  for (int r = 1; r < g.l2; ++r)
    seq.swap(g.horizontal_edge(r, g.l1 - 1), g.vertical_edge(r - 1, 0));
  seq.swap(g.horizontal_edge(0, g.l1 - 1), g.vertical_edge(g.l2 - 1, 0));

  // Stage 4: wrap-column vertex carriers.
  for (int r = 1; r < g.l2; ++r) {
    seq.cnot(g.horizontal_edge(r, 0), g.horizontal_edge(r, g.l1 - 1));
    seq.cnot(g.horizontal_edge(r + 1, g.l1 - 1), g.horizontal_edge(r, g.l1 - 1));
  }

  // Stage 5: remaining row folds.
  for (int r = 1; r < g.l2; ++r)
    for (int c = 0; c + 2 < g.l1; ++c)
      seq.cnot(g.horizontal_edge(r, c + 1), g.horizontal_edge(r, c));

  // Stage 6: corner resets and parity fans.
  std::uint32_t green_corner = g.vertical_edge(g.l2 - 1, 0);
  seq.reset(green_corner);
  for (int r = 0; r < g.l2; ++r)
    for (int c = 0; c < g.l1; ++c) {
      std::uint32_t q = g.vertical_edge(r, c);
      if (q != green_corner) seq.cnot(q, green_corner);
    }
  std::uint32_t gray_corner = g.horizontal_edge(0, g.l1 - 1);
  seq.reset(gray_corner);
  for (int r = 0; r < g.l2; ++r)
    for (int c = 0; c < g.l1; ++c) {
      std::uint32_t q = g.horizontal_edge(r, c);
      if (q != gray_corner) seq.cnot(q, gray_corner);
    }
  return seq;
}

}  // namespace qcnn
