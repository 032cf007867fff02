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

#include <random>
#include <stdexcept>
#include <utility>

#include "qcnn/bits.hpp"
#include "qcnn/circuit.hpp"
#include "qcnn/grid.hpp"
#include "qcnn/lattice.hpp"
#include "qcnn/rng.hpp"

namespace qcnn {

// A Pauli string stored as two bit masks; qubit q carries X iff x_mask[q],
// Z iff z_mask[q], Y iff both. The global phase is dropped: only the
// measurement-flip content of the string is ever consumed.
struct PauliFrame {
  BitVec x_mask;
  BitVec z_mask;

  explicit PauliFrame(std::size_t n) : x_mask(n), z_mask(n) {}
  std::size_t n_qubits() const { return x_mask.size(); }
  bool is_identity() const { return !x_mask.any() && !z_mask.any(); }
};

// Independent per-qubit flip probabilities; a qubit suffering both flips
// carries a Y error.
struct NoiseModel {
  double p_x = 0.0;
  double p_z = 0.0;
};

inline void validate(const NoiseModel& m) {
  if (!(m.p_x >= 0.0 && m.p_x <= 1.0 && m.p_z >= 0.0 && m.p_z <= 1.0))
    throw std::invalid_argument("NoiseModel: probabilities must lie in [0,1]");
}

// X- and Z-flip positions are drawn from separate streams so that results
// involving only one error type are unaffected by the other type's rate.
inline PauliFrame sample_noise(const NoiseModel& model,
                               const LatticeGeometry& geom,
                               std::mt19937_64& rng_x,
                               std::mt19937_64& rng_z) {
  validate(model);
  PauliFrame frame(geom.n_qubits());
  fill_bernoulli(frame.x_mask, model.p_x, rng_x);
  fill_bernoulli(frame.z_mask, model.p_z, rng_z);
  return frame;
}

inline PauliFrame sample_noise(const NoiseModel& model,
                               const LatticeGeometry& geom,
                               std::mt19937_64& rng) {
  return sample_noise(model, geom, rng, rng);
}

inline void apply_to_frame(PauliFrame& f, const CircuitOp& op) {
  switch (op.kind) {
    case OpKind::H: {
      bool x = f.x_mask.get(op.a), z = f.z_mask.get(op.a);
      f.x_mask.set(op.a, z);
      f.z_mask.set(op.a, x);
      break;
    }
    case OpKind::CNOT:
      if (f.x_mask.get(op.a)) f.x_mask.toggle(op.b);
      if (f.z_mask.get(op.b)) f.z_mask.toggle(op.a);
      break;
    case OpKind::SWAP: {
      bool xa = f.x_mask.get(op.a), za = f.z_mask.get(op.a);
      f.x_mask.set(op.a, f.x_mask.get(op.b));
      f.z_mask.set(op.a, f.z_mask.get(op.b));
      f.x_mask.set(op.b, xa);
      f.z_mask.set(op.b, za);
      break;
    }
    case OpKind::RESET:
      f.x_mask.set(op.a, false);
      f.z_mask.set(op.a, false);
      break;
  }
}

// frame' = U frame U† gate by gate, phases dropped; a reset forgets the
// error on its qubit (the qubit's state is discarded and re-prepared).
[[nodiscard]] inline PauliFrame conjugate_through(PauliFrame frame,
                                                  const GateSequence& seq) {
  if (frame.n_qubits() != seq.n_qubits)
    throw std::invalid_argument("conjugate_through: frame/sequence size mismatch");
  for (const CircuitOp& op : seq.ops) apply_to_frame(frame, op);
  return frame;
}

// Plaquette parities violated by the frame, one bit per cell (index
// r*l1 + c). A Z or Y component on an edge toggles the two cells the edge
// borders.
inline BitVec plaquette_syndrome_bits(const PauliFrame& frame,
                                      const LatticeGeometry& geom) {
  BitVec out(static_cast<std::size_t>(geom.n_cells()));
  frame.z_mask.for_each_set([&](std::size_t q) {
    auto [r, c] = geom.edge_coords(static_cast<std::uint32_t>(q));
    if (geom.is_horizontal(static_cast<std::uint32_t>(q))) {
      out.toggle(static_cast<std::size_t>(geom.wrap_row(r - 1)) * geom.l1 + c);
      out.toggle(static_cast<std::size_t>(r) * geom.l1 + c);
    } else {
      out.toggle(static_cast<std::size_t>(r) * geom.l1 + geom.wrap_col(c - 1));
      out.toggle(static_cast<std::size_t>(r) * geom.l1 + c);
    }
  });
  return out;
}

// Vertex parities violated by the frame; an X or Y component on an edge
// toggles the two sites the edge joins.
inline BitVec vertex_syndrome_bits(const PauliFrame& frame,
                                   const LatticeGeometry& geom) {
  BitVec out(static_cast<std::size_t>(geom.n_cells()));
  frame.x_mask.for_each_set([&](std::size_t q) {
    auto [r, c] = geom.edge_coords(static_cast<std::uint32_t>(q));
    if (geom.is_horizontal(static_cast<std::uint32_t>(q))) {
      out.toggle(static_cast<std::size_t>(r) * geom.l1 + c);
      out.toggle(static_cast<std::size_t>(r) * geom.l1 + geom.wrap_col(c + 1));
    } else {
      out.toggle(static_cast<std::size_t>(r) * geom.l1 + c);
      out.toggle(static_cast<std::size_t>(geom.wrap_row(r + 1)) * geom.l1 + c);
    }
  });
  return out;
}

// Square-lattice convenience: the two syndrome grids (plaquette grid tagged
// X — it is read out in the X basis — and vertex grid tagged Z).
inline std::pair<SyndromeGrid, SyndromeGrid> syndromes_direct(
    const PauliFrame& frame, const LatticeGeometry& geom) {
  if (geom.l1 != geom.l2)
    throw std::invalid_argument("syndromes_direct: grids require a square lattice");
  SyndromeGrid plaq(Basis::X, geom.l1);
  SyndromeGrid vert(Basis::Z, geom.l1);
  BitVec pb = plaquette_syndrome_bits(frame, geom);
  BitVec vb = vertex_syndrome_bits(frame, geom);
  pb.for_each_set([&](std::size_t i) {
    plaq.toggle(static_cast<int>(i) / geom.l1, static_cast<int>(i) % geom.l1);
  });
  vb.for_each_set([&](std::size_t i) {
    vert.toggle(static_cast<int>(i) / geom.l1, static_cast<int>(i) % geom.l1);
  });
  return {std::move(plaq), std::move(vert)};
}

// Computational-basis outcome flips caused by the frame: exactly the X
// components (Z components commute with a Z measurement).
inline const BitVec& measurement_flips(const PauliFrame& frame) {
  return frame.x_mask;
}

// Prediction for the flips observed after the convolution: each stabilizer
// parity appears at its designated carrier qubit, nowhere else.
inline BitVec expected_measurement_flips(const PauliFrame& frame,
                                         const LatticeGeometry& geom) {
  BitVec out(static_cast<std::size_t>(geom.n_qubits()));
  BitVec pb = plaquette_syndrome_bits(frame, geom);
  BitVec vb = vertex_syndrome_bits(frame, geom);
  pb.for_each_set([&](std::size_t i) {
    int r = static_cast<int>(i) / geom.l1, c = static_cast<int>(i) % geom.l1;
    out.set(designated_plaquette_qubit(geom, r, c), true);
  });
  vb.for_each_set([&](std::size_t i) {
    int r = static_cast<int>(i) / geom.l1, c = static_cast<int>(i) % geom.l1;
    out.set(designated_vertex_qubit(geom, r, c), true);
  });
  return out;
}

}  // namespace qcnn
