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
#include <string>
#include <vector>

#include "qcnn/bits.hpp"
#include "qcnn/circuit.hpp"
#include "qcnn/lattice.hpp"
#include "qcnn/pauli_frame.hpp"
#include "qcnn/tableau.hpp"

namespace qcnn {

enum class PauliType { X, Y, Z };

inline PauliFrame single_qubit_error(std::size_t n, std::uint32_t q,
                                     PauliType t) {
  PauliFrame f(n);
  if (t != PauliType::Z) f.x_mask.set(q, true);
  if (t != PauliType::X) f.z_mask.set(q, true);
  return f;
}

// The stabilizer at `id` expressed as a Pauli frame (plaquettes are X-type,
// vertices Z-type).
inline PauliFrame stabilizer_frame(const LatticeGeometry& geom,
                                   const StabilizerId& id) {
  PauliFrame f(geom.n_qubits());
  auto qs = stabilizer_qubits(geom, id);
  for (std::uint32_t q : qs) {
    if (id.kind == StabilizerKind::Plaquette)
      f.x_mask.toggle(q);
    else
      f.z_mask.toggle(q);
  }
  return f;
}

// The four non-contractible logical strings as frames, in the order:
// Z-string along a row of vertical edges, Z-string along a column of
// horizontal edges, X-string along a row of horizontal edges, X-string
// along a column of vertical edges.
inline std::vector<PauliFrame> logical_frames(const LatticeGeometry& geom) {
  LogicalOperators logical = logical_operators(geom);
  std::vector<PauliFrame> frames;
  const std::vector<std::uint32_t>* sets[4] = {&logical.z_row, &logical.z_col,
                                               &logical.x_row, &logical.x_col};
  for (int i = 0; i < 4; ++i) {
    PauliFrame f(geom.n_qubits());
    for (std::uint32_t q : *sets[i]) {
      if (i < 2)
        f.z_mask.set(q, true);
      else
        f.x_mask.set(q, true);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

// Tableau oracle: holds the prepared ground state and the convolution, and
// answers which measurement bits flip for a given injected error frame.
class ConvolutionOracle {
 public:
  explicit ConvolutionOracle(const LatticeGeometry& geom)
      : geom_(geom),
        conv_(build_convolution(geom)),
        base_(static_cast<std::uint32_t>(geom.n_qubits())) {
    std::mt19937_64 rng(0x1234abcdu);  // prep is unitary; rng never consumed
    base_.apply(build_prep_circuit(geom), rng);
  }

  const LatticeGeometry& geometry() const { return geom_; }
  const GateSequence& convolution() const { return conv_; }
  const Tableau& prepared_tableau() const { return base_; }

  // Measurement outcomes after injecting `error` into the prepared state
  // and running the convolution. Outcomes must be deterministic for every
  // Pauli error on a stabilizer state; a random outcome means the oracle
  // was fed a non-Pauli perturbation and is reported as a logic error.
  BitVec measurement_outcomes(const PauliFrame& error) const {
    Tableau t = base_;
    t.apply_pauli(error.x_mask, error.z_mask);
    std::mt19937_64 rng(0x5678u);
    t.apply(conv_, rng);
    MeasureAllResult res = measure_all(t, rng);
    if (!res.all_deterministic())
      throw std::logic_error("ConvolutionOracle: outcome not deterministic");
    return std::move(res.outcomes);
  }

 private:
  LatticeGeometry geom_;
  GateSequence conv_;
  Tableau base_;
};

struct ConvolutionIdentityReport {
  bool passed = false;
  std::uint32_t random_outcomes = 0;   // measurements with random results
  std::uint32_t nonzero_outcomes = 0;  // deterministic but not 0
  std::string detail;
};

// Runs the given preparation and convolution on |0...0> and checks the
// final Z-basis measurement is deterministic all-zero.
inline ConvolutionIdentityReport check_identity(const LatticeGeometry& geom,
                                                const GateSequence& prep,
                                                const GateSequence& conv) {
  Tableau t(static_cast<std::uint32_t>(geom.n_qubits()));
  std::mt19937_64 rng(0x2468u);
  t.apply(prep, rng);
  t.apply(conv, rng);
  MeasureAllResult res = measure_all(t, rng);
  ConvolutionIdentityReport report;
  for (std::uint32_t q = 0; q < res.outcomes.size(); ++q) {
    if (!res.deterministic.get(q)) ++report.random_outcomes;
    else if (res.outcomes.get(q)) ++report.nonzero_outcomes;
  }
  report.passed = report.random_outcomes == 0 && report.nonzero_outcomes == 0;
  if (!report.passed)
    report.detail = std::to_string(report.random_outcomes) + " random, " +
                    std::to_string(report.nonzero_outcomes) +
                    " nonzero outcomes";
  return report;
}

inline ConvolutionIdentityReport verify_convolution_identity(
    const LatticeGeometry& geom) {
  return check_identity(geom, build_prep_circuit(geom),
                        build_convolution(geom));
}

// Measurement flips produced by a single-qubit error injected between
// preparation and convolution, read off the tableau oracle.
inline BitVec check_syndrome_map(const LatticeGeometry& geom, std::uint32_t q,
                                 PauliType type) {
  ConvolutionOracle oracle(geom);
  return oracle.measurement_outcomes(
      single_qubit_error(geom.n_qubits(), q, type));
}

// True iff every logical string applied before the convolution leaves the
// deterministic all-zero readout unchanged.
inline bool logical_erasure_ok(const LatticeGeometry& geom) {
  ConvolutionOracle oracle(geom);
  BitVec baseline = oracle.measurement_outcomes(PauliFrame(geom.n_qubits()));
  if (baseline.any()) return false;
  for (const PauliFrame& f : logical_frames(geom)) {
    BitVec outcomes = oracle.measurement_outcomes(f);
    if (!(outcomes == baseline)) return false;
  }
  return true;
}

}  // namespace qcnn
