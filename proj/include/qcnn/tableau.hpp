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

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "qcnn/bits.hpp"
#include "qcnn/circuit.hpp"

namespace qcnn {

// Stabilizer-state simulator in the binary symplectic representation.
// Rows 0..n-1 are destabilizer generators, rows n..2n-1 stabilizer
// generators, row 2n is scratch for deterministic-outcome evaluation. Each
// row is a Pauli string (packed x/z bit words) with a sign bit; the initial
// state is |0...0> (destabilizers X_i, stabilizers Z_i, all signs +).
class Tableau {
 public:
  explicit Tableau(std::uint32_t n)
      : n_(n),
        words_(static_cast<std::size_t>((n + 63) / 64)),
        x_((2 * static_cast<std::size_t>(n) + 1) * words_, 0),
        z_((2 * static_cast<std::size_t>(n) + 1) * words_, 0),
        sign_(2 * static_cast<std::size_t>(n) + 1, 0) {
    for (std::uint32_t i = 0; i < n; ++i) {
      bits::set(x_row(i), i, true);
      bits::set(z_row(i + n), i, true);
    }
  }

  std::uint32_t n_qubits() const { return n_; }

  void h(std::uint32_t q) {
    std::size_t w = q >> 6;
    std::uint64_t m = std::uint64_t{1} << (q & 63);
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i) {
      std::uint64_t& xw = x_row(i)[w];
      std::uint64_t& zw = z_row(i)[w];
      sign_[i] ^= static_cast<std::uint8_t>(((xw & zw & m) != 0));
      std::uint64_t diff = (xw ^ zw) & m;
      xw ^= diff;
      zw ^= diff;
    }
  }

  void cnot(std::uint32_t c, std::uint32_t t) {
    std::size_t wc = c >> 6, wt = t >> 6;
    std::uint64_t mc = std::uint64_t{1} << (c & 63);
    std::uint64_t mt = std::uint64_t{1} << (t & 63);
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i) {
      std::uint64_t* xr = x_row(i);
      std::uint64_t* zr = z_row(i);
      bool xc = xr[wc] & mc, zc = zr[wc] & mc;
      bool xt = xr[wt] & mt, zt = zr[wt] & mt;
      sign_[i] ^= static_cast<std::uint8_t>(xc && zt && (xt == zc));
      if (xc) xr[wt] ^= mt;
      if (zt) zr[wc] ^= mc;
    }
  }

  void swap_qubits(std::uint32_t a, std::uint32_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i) {
      swap_bits(x_row(i), a, b);
      swap_bits(z_row(i), a, b);
    }
  }

  // Applies the Pauli string with the given masks (phases of the state are
  // irrelevant; only stabilizer signs change).
  void apply_pauli(const BitVec& xm, const BitVec& zm) {
    if (xm.size() != n_ || zm.size() != n_)
      throw std::invalid_argument("apply_pauli: mask size mismatch");
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i) {
      int par = 0;
      for (std::size_t w = 0; w < words_; ++w)
        par ^= std::popcount(z_row(i)[w] & xm.words()[w]) & 1;
      for (std::size_t w = 0; w < words_; ++w)
        par ^= std::popcount(x_row(i)[w] & zm.words()[w]) & 1;
      sign_[i] ^= static_cast<std::uint8_t>(par);
    }
  }

  // Z-basis measurement of qubit q. Random outcomes consume one bit of rng.
  int measure(std::uint32_t q, std::mt19937_64& rng) {
    bool dummy;
    return measure_impl(q, &rng, dummy);
  }

  int measure(std::uint32_t q, std::mt19937_64& rng, bool& deterministic) {
    return measure_impl(q, &rng, deterministic);
  }

  void reset(std::uint32_t q, std::mt19937_64& rng) {
    if (measure(q, rng) == 1) apply_x(q);
  }

  void apply(const CircuitOp& op, std::mt19937_64& rng) {
    switch (op.kind) {
      case OpKind::H: h(op.a); break;
      case OpKind::CNOT: cnot(op.a, op.b); break;
      case OpKind::SWAP: swap_qubits(op.a, op.b); break;
      case OpKind::RESET: reset(op.a, rng); break;
    }
  }

  void apply(const GateSequence& seq, std::mt19937_64& rng) {
    if (seq.n_qubits != n_)
      throw std::invalid_argument("Tableau::apply: qubit count mismatch");
    for (const CircuitOp& op : seq.ops) apply(op, rng);
  }

  // Expectation of the Pauli string P = (xm, zm): +1 or -1 when the state
  // is an eigenstate, 0 when the outcome would be random.
  int pauli_expectation(const BitVec& xm, const BitVec& zm) const {
    if (xm.size() != n_ || zm.size() != n_)
      throw std::invalid_argument("pauli_expectation: mask size mismatch");
    for (std::uint32_t i = n_; i < 2 * n_; ++i)
      if (anticommutes(i, xm, zm)) return 0;
    // P commutes with the whole stabilizer group, so it equals +/- the
    // product of the stabilizer rows whose destabilizer partners
    // anticommute with it; accumulate that product's sign.
    std::vector<std::uint64_t> ax(words_, 0), az(words_, 0);
    int phase = 0;  // units of i, mod 4
    for (std::uint32_t i = 0; i < n_; ++i) {
      if (!anticommutes(i, xm, zm)) continue;
      phase = product_phase(ax.data(), az.data(), x_row(i + n_), z_row(i + n_),
                            phase + 2 * sign_[i + n_]);
    }
    for (std::size_t w = 0; w < words_; ++w)
      if (ax[w] != xm.words()[w] || az[w] != zm.words()[w])
        throw std::logic_error("pauli_expectation: generator decomposition failed");
    if (phase & 1) throw std::logic_error("pauli_expectation: non-Hermitian product");
    return phase == 0 ? 1 : -1;
  }

  int z_expectation(std::uint32_t q) const {
    BitVec xm(n_), zm(n_);
    zm.set(q, true);
    return pauli_expectation(xm, zm);
  }

 private:
  std::uint64_t* x_row(std::size_t i) { return x_.data() + i * words_; }
  std::uint64_t* z_row(std::size_t i) { return z_.data() + i * words_; }
  const std::uint64_t* x_row(std::size_t i) const { return x_.data() + i * words_; }
  const std::uint64_t* z_row(std::size_t i) const { return z_.data() + i * words_; }

  static void swap_bits(std::uint64_t* row, std::uint32_t a, std::uint32_t b) {
    bool va = bits::get(row, a), vb = bits::get(row, b);
    if (va != vb) {
      bits::set(row, a, vb);
      bits::set(row, b, va);
    }
  }

  void apply_x(std::uint32_t q) {
    std::size_t w = q >> 6;
    std::uint64_t m = std::uint64_t{1} << (q & 63);
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i)
      sign_[i] ^= static_cast<std::uint8_t>((z_row(i)[w] & m) != 0);
  }

  bool anticommutes(std::size_t row, const BitVec& xm, const BitVec& zm) const {
    int par = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      par ^= std::popcount(x_row(row)[w] & zm.words()[w]) & 1;
      par ^= std::popcount(z_row(row)[w] & xm.words()[w]) & 1;
    }
    return par != 0;
  }

  // Multiplies the Pauli accumulator (ax, az) in place by row (rx, rz),
  // returning the updated phase exponent of i modulo 4. Per-qubit factor
  // table for the i-exponent of (x1,z1)*(x2,z2), with (x1,z1) the factor
  // already in the accumulator:
  //   Y*X -> -i, Y*Z -> +i, X*Z -> -i, X*Y -> +i, Z*X -> +i, Z*Y -> -i.
  int product_phase(std::uint64_t* ax, std::uint64_t* az,
                    const std::uint64_t* rx, const std::uint64_t* rz,
                    int phase) const {
    int plus = 0, minus = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t x1 = ax[w], z1 = az[w], x2 = rx[w], z2 = rz[w];
      std::uint64_t p = (x1 & z1 & z2 & ~x2) | (x1 & ~z1 & x2 & z2) |
                        (~x1 & z1 & x2 & ~z2);
      std::uint64_t m = (x1 & z1 & x2 & ~z2) | (x1 & ~z1 & ~x2 & z2) |
                        (~x1 & z1 & x2 & z2);
      plus += std::popcount(p);
      minus += std::popcount(m);
      ax[w] ^= x2;
      az[w] ^= z2;
    }
    return ((phase + plus - minus) % 4 + 4) % 4;
  }

  // Row h <- row h * row i (both tableau rows), with sign bookkeeping. The
  // combined i-exponent is always even here.
  void rowsum(std::size_t h, std::size_t i) {
    int phase = product_phase(x_row(h), z_row(h), x_row(i), z_row(i),
                              2 * (sign_[h] + sign_[i]));
    if (phase & 1) throw std::logic_error("rowsum: odd phase");
    sign_[h] = static_cast<std::uint8_t>(phase == 2);
  }

  int measure_impl(std::uint32_t q, std::mt19937_64* rng, bool& deterministic) {
    std::size_t w = q >> 6;
    std::uint64_t m = std::uint64_t{1} << (q & 63);
    std::size_t n = n_;
    std::size_t p = 2 * n;
    for (std::size_t i = n; i < 2 * n; ++i)
      if (x_row(i)[w] & m) { p = i; break; }
    if (p < 2 * n) {
      deterministic = false;
      // Row p - n (the partner destabilizer) may anticommute with row p, so
      // multiplying it would leave a non-Hermitian row; it is overwritten
      // with row p below anyway, so skip it.
      for (std::size_t i = 0; i < 2 * n; ++i)
        if (i != p && i != p - n && (x_row(i)[w] & m)) rowsum(i, p);
      // The old stabilizer becomes the destabilizer of the new Z_q row.
      std::copy(x_row(p), x_row(p) + words_, x_row(p - n));
      std::copy(z_row(p), z_row(p) + words_, z_row(p - n));
      sign_[p - n] = sign_[p];
      std::fill(x_row(p), x_row(p) + words_, 0);
      std::fill(z_row(p), z_row(p) + words_, 0);
      bits::set(z_row(p), q, true);
      int outcome = static_cast<int>((*rng)() & 1);
      sign_[p] = static_cast<std::uint8_t>(outcome);
      return outcome;
    }
    deterministic = true;
    std::size_t s = 2 * n;  // scratch row
    std::fill(x_row(s), x_row(s) + words_, 0);
    std::fill(z_row(s), z_row(s) + words_, 0);
    sign_[s] = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (x_row(i)[w] & m) rowsum(s, i + n);
    return sign_[s];
  }

  std::uint32_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
  std::vector<std::uint8_t> sign_;
};

// Z-basis measurement of every qubit in index order; outcome bit plus a
// per-qubit flag telling whether the outcome was deterministic.
struct MeasureAllResult {
  BitVec outcomes;
  BitVec deterministic;
  explicit MeasureAllResult(std::size_t n) : outcomes(n), deterministic(n) {}
  bool all_deterministic() const {
    return deterministic.popcount() == deterministic.size();
  }
};

inline MeasureAllResult measure_all(Tableau& tab, std::mt19937_64& rng) {
  MeasureAllResult res(tab.n_qubits());
  for (std::uint32_t q = 0; q < tab.n_qubits(); ++q) {
    bool det = false;
    int outcome = tab.measure(q, rng, det);
    res.outcomes.set(q, outcome != 0);
    res.deterministic.set(q, det);
  }
  return res;
}

}  // namespace qcnn
