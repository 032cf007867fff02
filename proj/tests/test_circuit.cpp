// Tests for gate-sequence plumbing, the ground-state preparation circuit and
// the syndrome-concentrating (convolution) layer. State-level correctness is
// checked with the stabilizer tableau: the prep circuit must stabilize every
// plaquette and vertex operator, and prep followed by the convolution must
// drive |0...0> to a deterministic all-zero measurement outcome.

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <set>
#include <string>

#include "qcnn/circuit.hpp"
#include "qcnn/lattice.hpp"
#include "qcnn/rng.hpp"
#include "qcnn/tableau.hpp"

namespace {

using qcnn::GateSequence;
using qcnn::LatticeGeometry;
using qcnn::OpKind;

// Pauli masks of an X- or Z-type product over the given edges.
qcnn::BitVec support_mask(std::uint32_t n, const std::array<std::uint32_t, 4>& qs) {
  qcnn::BitVec m(n);
  for (auto q : qs) m.toggle(q);
  return m;
}

}  // namespace

TEST_CASE("GateSequence builders record the expected ops") {
  GateSequence seq;
  seq.n_qubits = 4;
  seq.h(0);
  seq.cnot(0, 1);
  seq.swap(1, 2);
  seq.reset(3);
  REQUIRE(seq.ops.size() == 4);
  REQUIRE(seq.ops[0].kind == OpKind::H);
  REQUIRE(seq.ops[1].kind == OpKind::CNOT);
  REQUIRE(seq.ops[1].a == 0);
  REQUIRE(seq.ops[1].b == 1);
  REQUIRE(seq.ops[2].kind == OpKind::SWAP);
  REQUIRE(seq.ops[3].kind == OpKind::RESET);
  REQUIRE(qcnn::to_text(seq) == "H 0\nCNOT 0 1\nSWAP 1 2\nRESET 3\n");

  GateSequence more;
  more.cnot(2, 3);
  seq.append(more);
  REQUIRE(seq.ops.size() == 5);
  REQUIRE(seq.ops[4].b == 3);
}

TEST_CASE("invert_sequence reverses order and rejects resets") {
  GateSequence seq;
  seq.n_qubits = 3;
  seq.h(0);
  seq.cnot(0, 1);
  seq.swap(1, 2);
  GateSequence inv = qcnn::invert_sequence(seq);
  REQUIRE(inv.n_qubits == 3);
  REQUIRE(inv.ops.size() == 3);
  REQUIRE(inv.ops[0].kind == OpKind::SWAP);
  REQUIRE(inv.ops[2].kind == OpKind::H);

  seq.reset(0);
  REQUIRE_THROWS_AS(qcnn::invert_sequence(seq), std::invalid_argument);
}

TEST_CASE("inverse after forward is the identity on stabilizer states") {
  LatticeGeometry g = qcnn::build_torus(3, 3);
  GateSequence prep = qcnn::build_prep_circuit(g);
  GateSequence inv = qcnn::invert_sequence(prep);
  qcnn::Tableau tab(g.n_qubits());
  auto rng = qcnn::make_stream(1, 1);
  tab.apply(prep, rng);
  tab.apply(inv, rng);
  // Back to |0...0>: every single-qubit Z expectation is +1.
  for (std::uint32_t q = 0; q < g.n_qubits(); ++q)
    REQUIRE(tab.z_expectation(q) == 1);
}

TEST_CASE("prep circuit gate budget and structure") {
  LatticeGeometry g = qcnn::build_torus(3, 3);
  GateSequence prep = qcnn::build_prep_circuit(g);
  REQUIRE(prep.n_qubits == g.n_qubits());
  // One H + three CNOTs per independent plaquette (n_cells - 1 of them).
  int n_h = 0, n_cnot = 0, n_other = 0;
  for (const auto& op : prep.ops) {
    if (op.kind == OpKind::H) ++n_h;
    else if (op.kind == OpKind::CNOT) ++n_cnot;
    else ++n_other;
  }
  REQUIRE(n_h == g.n_cells() - 1);
  REQUIRE(n_cnot == 3 * (g.n_cells() - 1));
  REQUIRE(n_other == 0);

  // Each H lands on a fresh representative (no qubit repeats).
  std::set<std::uint32_t> reps;
  for (const auto& op : prep.ops)
    if (op.kind == OpKind::H) reps.insert(op.a);
  REQUIRE(reps.size() == std::size_t(g.n_cells() - 1));

  REQUIRE_THROWS_AS(qcnn::build_prep_circuit(qcnn::build_torus(2, 3)),
                    std::invalid_argument);
}

TEST_CASE("prep circuit prepares a simultaneous +1 eigenstate of all stabilizers") {
  for (auto [l1, l2] : std::vector<std::pair<int, int>>{{3, 3}, {3, 4}, {5, 3}}) {
    LatticeGeometry g = qcnn::build_torus(l1, l2);
    qcnn::Tableau tab(g.n_qubits());
    auto rng = qcnn::make_stream(2, l1, l2);
    tab.apply(qcnn::build_prep_circuit(g), rng);
    qcnn::BitVec zero(g.n_qubits());
    for (int r = 0; r < g.l2; ++r)
      for (int c = 0; c < g.l1; ++c) {
        auto xm = support_mask(g.n_qubits(), qcnn::plaquette_qubits(g, r, c));
        REQUIRE(tab.pauli_expectation(xm, zero) == 1);
        auto zm = support_mask(g.n_qubits(), qcnn::vertex_qubits(g, r, c));
        REQUIRE(tab.pauli_expectation(zero, zm) == 1);
      }
    // The state also sits in the +1 sector of both logical Z strings,
    // because it is built from |0...0> by X-type stabilizer projections.
    auto L = qcnn::logical_operators(g);
    qcnn::BitVec z_row(g.n_qubits()), z_col(g.n_qubits());
    for (auto q : L.z_row) z_row.toggle(q);
    for (auto q : L.z_col) z_col.toggle(q);
    REQUIRE(tab.pauli_expectation(zero, z_row) == 1);
    REQUIRE(tab.pauli_expectation(zero, z_col) == 1);
  }
}

TEST_CASE("designated carrier map is a bijection per sublattice") {
  for (auto [l1, l2] : std::vector<std::pair<int, int>>{{3, 3}, {4, 5}}) {
    LatticeGeometry g = qcnn::build_torus(l1, l2);
    std::set<std::uint32_t> plaq_carriers, vert_carriers;
    for (int r = 0; r < g.l2; ++r)
      for (int c = 0; c < g.l1; ++c) {
        std::uint32_t pq = qcnn::designated_plaquette_qubit(g, r, c);
        std::uint32_t vq = qcnn::designated_vertex_qubit(g, r, c);
        REQUIRE_FALSE(g.is_horizontal(pq));  // vertical edges carry plaquettes
        REQUIRE(g.is_horizontal(vq));        // horizontal edges carry vertices
        plaq_carriers.insert(pq);
        vert_carriers.insert(vq);
      }
    REQUIRE(plaq_carriers.size() == std::size_t(g.n_cells()));
    REQUIRE(vert_carriers.size() == std::size_t(g.n_cells()));
  }
}

TEST_CASE("convolution structure: starts with inverse prep, resets both corners") {
  LatticeGeometry g = qcnn::build_torus(3, 3);
  GateSequence conv = qcnn::build_convolution(g);
  GateSequence inv = qcnn::invert_sequence(qcnn::build_prep_circuit(g));
  REQUIRE(conv.ops.size() > inv.ops.size());
  for (std::size_t i = 0; i < inv.ops.size(); ++i) {
    REQUIRE(conv.ops[i].kind == inv.ops[i].kind);
    REQUIRE(conv.ops[i].a == inv.ops[i].a);
    REQUIRE(conv.ops[i].b == inv.ops[i].b);
  }
  int n_reset = 0;
  std::set<std::uint32_t> reset_qubits;
  for (const auto& op : conv.ops)
    if (op.kind == OpKind::RESET) {
      ++n_reset;
      reset_qubits.insert(op.a);
    }
  REQUIRE(n_reset == 2);
  REQUIRE(reset_qubits.count(g.vertical_edge(g.l2 - 1, 0)) == 1);
  REQUIRE(reset_qubits.count(g.horizontal_edge(0, g.l1 - 1)) == 1);
  REQUIRE_THROWS_AS(qcnn::build_convolution(qcnn::build_torus(2, 3)),
                    std::invalid_argument);
}

TEST_CASE("prep then convolution measures deterministically to all zeros") {
  for (int side : {3, 4}) {
    LatticeGeometry g = qcnn::build_torus(side, side);
    qcnn::Tableau tab(g.n_qubits());
    auto rng = qcnn::make_stream(3, side);
    tab.apply(qcnn::build_prep_circuit(g), rng);
    tab.apply(qcnn::build_convolution(g), rng);
    auto res = qcnn::measure_all(tab, rng);
    REQUIRE(res.all_deterministic());
    REQUIRE_FALSE(res.outcomes.any());
  }
}
