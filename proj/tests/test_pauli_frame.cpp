// Tests for Pauli-frame tracking. The frame's conjugation rules are checked
// against the stabilizer tableau (an error applied before a circuit must
// shift every observable exactly as the conjugated frame predicts), and the
// syndrome extraction against stabilizer-support overlap parities computed
// independently from the lattice tables.

#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <utility>

#include "qcnn/bits.hpp"
#include "qcnn/circuit.hpp"
#include "qcnn/grid.hpp"
#include "qcnn/lattice.hpp"
#include "qcnn/pauli_frame.hpp"
#include "qcnn/rng.hpp"
#include "qcnn/tableau.hpp"

namespace {

using qcnn::BitVec;
using qcnn::GateSequence;
using qcnn::LatticeGeometry;
using qcnn::PauliFrame;
using qcnn::Tableau;

PauliFrame random_frame(std::size_t n, std::mt19937_64& rng) {
  PauliFrame f(n);
  qcnn::fill_bernoulli(f.x_mask, 0.3, rng);
  qcnn::fill_bernoulli(f.z_mask, 0.3, rng);
  return f;
}

GateSequence random_unitary_circuit(std::uint32_t n, int gates,
                                    std::mt19937_64& rng) {
  GateSequence seq;
  seq.n_qubits = n;
  for (int g = 0; g < gates; ++g) {
    int kind = int(rng() % 3);
    auto a = std::uint32_t(rng() % n);
    auto b = std::uint32_t(rng() % (n - 1));
    if (b >= a) ++b;
    if (kind == 0)
      seq.h(a);
    else if (kind == 1)
      seq.cnot(a, b);
    else
      seq.swap(a, b);
  }
  return seq;
}

// Parity of |support(stabilizer) ∩ mask| straight from the lattice tables.
bool overlap_parity(const LatticeGeometry& g, qcnn::StabilizerKind kind, int r,
                    int c, const BitVec& mask) {
  bool p = false;
  for (auto q : qcnn::stabilizer_qubits(g, {kind, r, c})) p ^= mask.get(q);
  return p;
}

}  // namespace

TEST_CASE("single-op conjugation rules") {
  using qcnn::CircuitOp;
  using qcnn::OpKind;
  PauliFrame f(3);

  SECTION("H exchanges X and Z") {
    f.x_mask.set(0, true);
    f.z_mask.set(1, true);
    qcnn::apply_to_frame(f, {OpKind::H, 0, 0});
    qcnn::apply_to_frame(f, {OpKind::H, 1, 0});
    REQUIRE_FALSE(f.x_mask.get(0));
    REQUIRE(f.z_mask.get(0));
    REQUIRE(f.x_mask.get(1));
    REQUIRE_FALSE(f.z_mask.get(1));
    // Y is H-invariant.
    f.x_mask.set(2, true);
    f.z_mask.set(2, true);
    qcnn::apply_to_frame(f, {OpKind::H, 2, 0});
    REQUIRE(f.x_mask.get(2));
    REQUIRE(f.z_mask.get(2));
  }

  SECTION("CNOT copies X forward and Z backward") {
    f.x_mask.set(0, true);  // X on control
    qcnn::apply_to_frame(f, {OpKind::CNOT, 0, 1});
    REQUIRE(f.x_mask.get(0));
    REQUIRE(f.x_mask.get(1));
    f.x_mask.clear();
    f.z_mask.set(1, true);  // Z on target
    qcnn::apply_to_frame(f, {OpKind::CNOT, 0, 1});
    REQUIRE(f.z_mask.get(1));
    REQUIRE(f.z_mask.get(0));
    // X on target and Z on control are fixed points.
    f.x_mask.clear();
    f.z_mask.clear();
    f.x_mask.set(1, true);
    f.z_mask.set(0, true);
    qcnn::apply_to_frame(f, {OpKind::CNOT, 0, 1});
    REQUIRE(f.x_mask.get(1));
    REQUIRE_FALSE(f.x_mask.get(0));
    REQUIRE(f.z_mask.get(0));
    REQUIRE_FALSE(f.z_mask.get(1));
  }

  SECTION("SWAP exchanges both components, RESET forgets") {
    f.x_mask.set(0, true);
    f.z_mask.set(1, true);
    qcnn::apply_to_frame(f, {OpKind::SWAP, 0, 1});
    REQUIRE(f.x_mask.get(1));
    REQUIRE(f.z_mask.get(0));
    qcnn::apply_to_frame(f, {OpKind::RESET, 1, 0});
    REQUIRE_FALSE(f.x_mask.get(1));
    REQUIRE(f.z_mask.get(0));
  }
}

TEST_CASE("conjugate_through matches the tableau on random circuits") {
  const std::uint32_t n = 8;
  for (int trial = 0; trial < 30; ++trial) {
    auto rng = qcnn::make_stream(200, trial);
    GateSequence seq = random_unitary_circuit(n, 60, rng);
    PauliFrame frame = random_frame(n, rng);

    Tableau clean(n), noisy(n);
    noisy.apply_pauli(frame.x_mask, frame.z_mask);
    auto grng = qcnn::make_stream(201, trial);
    clean.apply(seq, grng);
    noisy.apply(seq, grng);

    PauliFrame conj = qcnn::conjugate_through(frame, seq);
    // Z_q expectation changes sign exactly where the conjugated frame has an
    // X component; random outcomes (expectation 0) stay random.
    for (std::uint32_t q = 0; q < n; ++q) {
      int base = clean.z_expectation(q);
      int flipped = noisy.z_expectation(q);
      int sign = conj.x_mask.get(q) ? -1 : 1;
      REQUIRE(flipped == sign * base);
    }
  }
}

TEST_CASE("a reset inside the circuit erases the frame on that qubit") {
  GateSequence seq;
  seq.n_qubits = 3;
  seq.reset(0);
  seq.cnot(0, 1);  // would spread a surviving X
  PauliFrame f(3);
  f.x_mask.set(0, true);
  f.z_mask.set(0, true);
  PauliFrame out = qcnn::conjugate_through(f, seq);
  REQUIRE(out.is_identity());

  PauliFrame wrong(2);
  REQUIRE_THROWS_AS(qcnn::conjugate_through(wrong, seq), std::invalid_argument);
}

TEST_CASE("sample_noise respects rates and stream separation") {
  LatticeGeometry g = qcnn::build_torus(9, 9);

  auto rng0 = qcnn::make_stream(5, 0);
  PauliFrame none = qcnn::sample_noise({0.0, 0.0}, g, rng0);
  REQUIRE(none.is_identity());

  PauliFrame all = qcnn::sample_noise({1.0, 1.0}, g, rng0);
  REQUIRE(all.x_mask.popcount() == g.n_qubits());
  REQUIRE(all.z_mask.popcount() == g.n_qubits());

  // Same X stream, different Z streams: identical x_mask.
  auto ax = qcnn::make_stream(6, 1);
  auto az1 = qcnn::make_stream(6, 2);
  PauliFrame f1 = qcnn::sample_noise({0.2, 0.4}, g, ax, az1);
  auto bx = qcnn::make_stream(6, 1);
  auto bz2 = qcnn::make_stream(6, 3);
  PauliFrame f2 = qcnn::sample_noise({0.2, 0.7}, g, bx, bz2);
  REQUIRE(f1.x_mask == f2.x_mask);

  REQUIRE_THROWS_AS(qcnn::sample_noise({-0.1, 0.0}, g, rng0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(qcnn::sample_noise({0.0, 1.5}, g, rng0),
                    std::invalid_argument);
}

TEST_CASE("syndrome bits equal stabilizer overlap parities") {
  for (auto [l1, l2] : std::vector<std::pair<int, int>>{{3, 3}, {4, 3}, {5, 5}}) {
    LatticeGeometry g = qcnn::build_torus(l1, l2);
    // Exhaustive single-qubit errors.
    for (std::uint32_t q = 0; q < g.n_qubits(); ++q) {
      PauliFrame f(g.n_qubits());
      f.x_mask.set(q, true);
      BitVec vb = qcnn::vertex_syndrome_bits(f, g);
      REQUIRE(vb.popcount() == 2);
      for (int r = 0; r < g.l2; ++r)
        for (int c = 0; c < g.l1; ++c)
          REQUIRE(vb.get(std::size_t(r) * g.l1 + c) ==
                  overlap_parity(g, qcnn::StabilizerKind::Vertex, r, c, f.x_mask));
      REQUIRE_FALSE(qcnn::plaquette_syndrome_bits(f, g).any());

      PauliFrame fz(g.n_qubits());
      fz.z_mask.set(q, true);
      BitVec pb = qcnn::plaquette_syndrome_bits(fz, g);
      REQUIRE(pb.popcount() == 2);
      for (int r = 0; r < g.l2; ++r)
        for (int c = 0; c < g.l1; ++c)
          REQUIRE(pb.get(std::size_t(r) * g.l1 + c) ==
                  overlap_parity(g, qcnn::StabilizerKind::Plaquette, r, c, fz.z_mask));
      REQUIRE_FALSE(qcnn::vertex_syndrome_bits(fz, g).any());
    }
    // Random multi-error frames.
    auto rng = qcnn::make_stream(7, l1, l2);
    for (int rep = 0; rep < 10; ++rep) {
      PauliFrame f = random_frame(g.n_qubits(), rng);
      BitVec pb = qcnn::plaquette_syndrome_bits(f, g);
      BitVec vb = qcnn::vertex_syndrome_bits(f, g);
      for (int r = 0; r < g.l2; ++r)
        for (int c = 0; c < g.l1; ++c) {
          REQUIRE(pb.get(std::size_t(r) * g.l1 + c) ==
                  overlap_parity(g, qcnn::StabilizerKind::Plaquette, r, c, f.z_mask));
          REQUIRE(vb.get(std::size_t(r) * g.l1 + c) ==
                  overlap_parity(g, qcnn::StabilizerKind::Vertex, r, c, f.x_mask));
        }
    }
  }
}

TEST_CASE("single errors light up the documented syndrome pairs") {
  LatticeGeometry g = qcnn::build_torus(4, 4);
  // X on a vertical edge flips the vertices above and below.
  PauliFrame f(g.n_qubits());
  f.x_mask.set(g.vertical_edge(1, 2), true);
  BitVec vb = qcnn::vertex_syndrome_bits(f, g);
  REQUIRE(vb.get(std::size_t(1) * g.l1 + 2));
  REQUIRE(vb.get(std::size_t(2) * g.l1 + 2));
  // X on a horizontal edge flips the vertices left and right.
  f.x_mask.clear();
  f.x_mask.set(g.horizontal_edge(0, 3), true);
  vb = qcnn::vertex_syndrome_bits(f, g);
  REQUIRE(vb.get(std::size_t(0) * g.l1 + 3));
  REQUIRE(vb.get(std::size_t(0) * g.l1 + 0));  // wraps
  // Z on a horizontal edge flips the plaquettes above and below.
  PauliFrame fz(g.n_qubits());
  fz.z_mask.set(g.horizontal_edge(0, 1), true);
  BitVec pb = qcnn::plaquette_syndrome_bits(fz, g);
  REQUIRE(pb.get(std::size_t(3) * g.l1 + 1));  // wraps to row l2-1
  REQUIRE(pb.get(std::size_t(0) * g.l1 + 1));
  // Z on a vertical edge flips the plaquettes left and right.
  fz.z_mask.clear();
  fz.z_mask.set(g.vertical_edge(2, 0), true);
  pb = qcnn::plaquette_syndrome_bits(fz, g);
  REQUIRE(pb.get(std::size_t(2) * g.l1 + 3));  // wraps to col l1-1
  REQUIRE(pb.get(std::size_t(2) * g.l1 + 0));
}

TEST_CASE("syndromes_direct packs the bit masks into tagged grids") {
  LatticeGeometry g = qcnn::build_torus(3, 3);
  auto rng = qcnn::make_stream(8, 8);
  PauliFrame f = random_frame(g.n_qubits(), rng);
  auto [plaq, vert] = qcnn::syndromes_direct(f, g);
  REQUIRE(plaq.basis() == qcnn::Basis::X);
  REQUIRE(vert.basis() == qcnn::Basis::Z);
  REQUIRE(plaq.side() == 3);
  BitVec pb = qcnn::plaquette_syndrome_bits(f, g);
  BitVec vb = qcnn::vertex_syndrome_bits(f, g);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      REQUIRE(plaq.get(r, c) == pb.get(std::size_t(r) * 3 + c));
      REQUIRE(vert.get(r, c) == vb.get(std::size_t(r) * 3 + c));
    }
  REQUIRE_THROWS_AS(qcnn::syndromes_direct(f, qcnn::build_torus(3, 4)),
                    std::invalid_argument);
}

TEST_CASE("every single error lands its syndrome on the designated carriers") {
  LatticeGeometry g = qcnn::build_torus(3, 3);
  GateSequence conv = qcnn::build_convolution(g);
  Tableau base(g.n_qubits());
  auto rng = qcnn::make_stream(9, 9);
  base.apply(qcnn::build_prep_circuit(g), rng);

  auto outcomes_with = [&](const PauliFrame& err) {
    Tableau t = base;
    t.apply_pauli(err.x_mask, err.z_mask);
    auto r2 = qcnn::make_stream(10, 1);
    t.apply(conv, r2);
    auto res = qcnn::measure_all(t, r2);
    REQUIRE(res.all_deterministic());
    return res.outcomes;
  };
  const BitVec clean = outcomes_with(PauliFrame(g.n_qubits()));
  REQUIRE_FALSE(clean.any());

  for (std::uint32_t q = 0; q < g.n_qubits(); ++q) {
    for (int type = 0; type < 3; ++type) {  // X, Z, Y
      PauliFrame err(g.n_qubits());
      if (type != 1) err.x_mask.set(q, true);
      if (type != 0) err.z_mask.set(q, true);

      BitVec flips = outcomes_with(err);  // relative to all-zero clean run

      // Tableau result == frame-tracking result == direct carrier map.
      PauliFrame conj = qcnn::conjugate_through(err, conv);
      REQUIRE(flips == qcnn::measurement_flips(conj));
      REQUIRE(flips == qcnn::expected_measurement_flips(err, g));
    }
  }
}
