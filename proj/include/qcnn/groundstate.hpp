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

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcnn/bits.hpp"
#include "qcnn/grid.hpp"
#include "qcnn/lattice.hpp"
#include "qcnn/rng.hpp"

namespace qcnn {

// Magnetic fields plus the weight of the energy penalty that lifts the
// ground-space degeneracy by rewarding the +1 sector of one logical
// Z-string and one logical X-string.
struct FieldParams {
  double h_x = 0.0;
  double h_z = 0.0;
  double penalty = 0.0;
};

inline constexpr int kMaxExactQubits = 24;

// Matrix-free Hamiltonian
//   H = -sum_p A_p - sum_v B_v - h_z sum_q Z_q - h_x sum_q X_q
//       - penalty * (W_Z + W_X)
// on the 2^N computational basis (bit q of the index = 1 means qubit q in
// |1>). Vertex, Z-field and W_Z terms are diagonal (precomputed); plaquette,
// X-field and W_X terms pair each index with index XOR mask.
class SparseHamiltonian {
 public:
  SparseHamiltonian(const LatticeGeometry& geom, const FieldParams& params)
      : geom_(geom), params_(params) {
    if (geom.n_qubits() > kMaxExactQubits)
      throw std::invalid_argument(
          "SparseHamiltonian: exact solver capped at " +
          std::to_string(kMaxExactQubits) + " qubits");
    const int n = geom.n_qubits();
    dim_ = std::size_t(1) << n;

    std::vector<std::uint32_t> vertex_masks;
    for (int r = 0; r < geom.l2; ++r)
      for (int c = 0; c < geom.l1; ++c) {
        vertex_masks.push_back(
            qubit_mask(vertex_qubits(geom, r, c)));
        flip_masks_.push_back(qubit_mask(plaquette_qubits(geom, r, c)));
        flip_coeffs_.push_back(-1.0);
      }
    if (params.h_x != 0.0)
      for (int q = 0; q < n; ++q) {
        flip_masks_.push_back(std::uint32_t(1) << q);
        flip_coeffs_.push_back(-params.h_x);
      }
    LogicalOperators logical = logical_operators(geom);
    std::uint32_t wz = qubit_set_mask(logical.z_row);
    if (params.penalty != 0.0) {
      flip_masks_.push_back(qubit_set_mask(logical.x_row));
      flip_coeffs_.push_back(-params.penalty);
    }

    diag_.resize(dim_);
    for (std::size_t b = 0; b < dim_; ++b) {
      double d = 0.0;
      for (std::uint32_t vm : vertex_masks)
        d -= parity_sign(std::uint32_t(b), vm);
      d -= params.h_z * (n - 2 * std::popcount(std::uint32_t(b)));
      if (params.penalty != 0.0)
        d -= params.penalty * parity_sign(std::uint32_t(b), wz);
      diag_[b] = d;
    }
  }

  std::size_t dimension() const { return dim_; }
  const LatticeGeometry& geometry() const { return geom_; }
  const FieldParams& params() const { return params_; }

  void apply(const double* in, double* out) const {
    for (std::size_t b = 0; b < dim_; ++b) out[b] = diag_[b] * in[b];
    for (std::size_t t = 0; t < flip_masks_.size(); ++t) {
      const std::uint32_t m = flip_masks_[t];
      const double c = flip_coeffs_[t];
      for (std::size_t b = 0; b < dim_; ++b) out[b] += c * in[b ^ m];
    }
  }

  std::vector<double> apply(const std::vector<double>& in) const {
    if (in.size() != dim_)
      throw std::invalid_argument("SparseHamiltonian::apply: bad dimension");
    std::vector<double> out(dim_);
    apply(in.data(), out.data());
    return out;
  }

  static std::uint32_t qubit_mask(const std::array<std::uint32_t, 4>& qs) {
    std::uint32_t m = 0;
    for (std::uint32_t q : qs) m |= std::uint32_t(1) << q;
    return m;
  }
  static std::uint32_t qubit_set_mask(const std::vector<std::uint32_t>& qs) {
    std::uint32_t m = 0;
    for (std::uint32_t q : qs) m |= std::uint32_t(1) << q;
    return m;
  }
  static int parity_sign(std::uint32_t b, std::uint32_t mask) {
    return (std::popcount(b & mask) & 1) ? -1 : 1;
  }

 private:
  LatticeGeometry geom_;
  FieldParams params_;
  std::size_t dim_ = 0;
  std::vector<double> diag_;
  std::vector<std::uint32_t> flip_masks_;
  std::vector<double> flip_coeffs_;
};

inline SparseHamiltonian build_hamiltonian(const LatticeGeometry& geom,
                                           const FieldParams& params) {
  return SparseHamiltonian(geom, params);
}

struct GroundStateResult {
  std::vector<double> vector;
  double energy = 0.0;
  double residual = 0.0;  // ||H v - E v||
  int matvecs = 0;
  bool converged = false;
  std::string message;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x,
                 std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

inline void orthogonalize(std::vector<double>& w,
                          const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : basis) axpy(-dot(w, u), u, w);
}

inline std::vector<double> random_vector(std::size_t dim, std::mt19937_64& rng) {
  std::vector<double> v(dim);
  for (double& x : v) x = 2.0 * uniform_unit(rng) - 1.0;
  return v;
}

}  // namespace detail

struct SolverOptions {
  double tol = 1e-10;      // on ||H v - E v||
  int max_basis = 48;      // Krylov vectors kept per restart cycle
  int max_restarts = 400;
  std::uint64_t seed = 0x5eedf00dULL;
};

// Restarted Lanczos with full reorthogonalization for the lowest eigenpair,
// deflated against `locked` (already-converged orthonormal eigenvectors).
inline GroundStateResult lowest_eigenpair(
    const SparseHamiltonian& H,
    const std::vector<std::vector<double>>& locked,
    const std::vector<double>* warm_start, SolverOptions opt) {
  const std::size_t dim = H.dimension();
  std::mt19937_64 rng = make_stream(opt.seed, 0x6c616e63ULL);
  // Large state vectors shrink the stored basis to bound memory.
  int max_basis = std::min<std::size_t>(
      opt.max_basis,
      std::max<std::size_t>(8, (std::size_t(2) << 30) / (sizeof(double) * dim)));

  GroundStateResult res;
  std::vector<double> v;
  if (warm_start != nullptr) {
    if (warm_start->size() != dim)
      throw std::invalid_argument("lowest_eigenpair: warm start dimension");
    v = *warm_start;
  } else {
    v = detail::random_vector(dim, rng);
  }

  std::vector<std::vector<double>> basis;
  std::vector<double> w(dim), ritz(dim);
  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    detail::orthogonalize(v, locked);
    double nv = detail::norm(v);
    if (nv < 1e-12) {
      v = detail::random_vector(dim, rng);
      detail::orthogonalize(v, locked);
      nv = detail::norm(v);
    }
    detail::scale(v, 1.0 / nv);

    basis.clear();
    basis.push_back(v);
    std::vector<double> alpha, beta;
    bool exhausted = false;
    for (int j = 0; j < max_basis; ++j) {
      H.apply(basis[j].data(), w.data());
      ++res.matvecs;
      alpha.push_back(detail::dot(w, basis[j]));
      detail::axpy(-alpha[j], basis[j], w);
      if (j > 0) detail::axpy(-beta[j - 1], basis[j - 1], w);
      detail::orthogonalize(w, basis);
      detail::orthogonalize(w, locked);
      double nb = detail::norm(w);
      if (nb < 1e-12) {
        exhausted = true;  // exact invariant subspace reached
        break;
      }
      if (j + 1 < max_basis) {
        beta.push_back(nb);
        detail::scale(w, 1.0 / nb);
        basis.push_back(w);
      } else {
        beta.push_back(nb);
      }
    }

    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd ad(m), bd(std::max(0, m - 1));
    for (int i = 0; i < m; ++i) ad[i] = alpha[i];
    for (int i = 0; i + 1 < m; ++i) bd[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(ad, bd, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd& y = es.eigenvectors().col(0);
    const double theta = es.eigenvalues()[0];

    std::fill(ritz.begin(), ritz.end(), 0.0);
    for (int i = 0; i < static_cast<int>(basis.size()); ++i)
      detail::axpy(y[i], basis[i], ritz);
    detail::orthogonalize(ritz, locked);
    double nr = detail::norm(ritz);
    if (nr < 1e-12) {
      v = detail::random_vector(dim, rng);
      continue;
    }
    detail::scale(ritz, 1.0 / nr);

    H.apply(ritz.data(), w.data());
    ++res.matvecs;
    double energy = detail::dot(w, ritz);
    detail::axpy(-energy, ritz, w);
    double true_res = detail::norm(w);
    res.energy = energy;
    res.residual = true_res;
    if (true_res < opt.tol || (exhausted && true_res < 1e3 * opt.tol)) {
      res.vector = std::move(ritz);
      res.converged = true;
      return res;
    }
    (void)theta;
    v = ritz;
  }
  res.vector = std::move(ritz);
  res.converged = false;
  res.message = "lanczos: residual " + std::to_string(res.residual) +
                " after max restarts";
  return res;
}

inline GroundStateResult ground_state(const SparseHamiltonian& H, double tol,
                                      const std::vector<double>* warm_start =
                                          nullptr) {
  SolverOptions opt;
  opt.tol = tol;
  return lowest_eigenpair(H, {}, warm_start, opt);
}

// k lowest eigenpairs via successive deflation.
inline std::vector<GroundStateResult> lowest_eigenpairs(
    const SparseHamiltonian& H, int k, double tol) {
  std::vector<GroundStateResult> out;
  std::vector<std::vector<double>> locked;
  for (int i = 0; i < k; ++i) {
    SolverOptions opt;
    opt.tol = tol;
    opt.seed ^= std::uint64_t(i) * 0x9e3779b97f4a7c15ULL;
    GroundStateResult r = lowest_eigenpair(H, locked, nullptr, opt);
    locked.push_back(r.vector);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(),
            [](const GroundStateResult& a, const GroundStateResult& b) {
              return a.energy < b.energy;
            });
  return out;
}

// Degeneracy-resolving protocol: solve with the logical penalty switched
// on, then re-solve the penalty-free Hamiltonian warm-started from the
// penalized ground state, which pins the solver to the +1 loop sector.
inline GroundStateResult solve_two_step(const LatticeGeometry& geom,
                                        const FieldParams& stage1,
                                        const FieldParams& stage2,
                                        double tol) {
  SparseHamiltonian h1(geom, stage1);
  GroundStateResult r1 = ground_state(h1, tol);
  if (!r1.converged) return r1;
  SparseHamiltonian h2(geom, stage2);
  return ground_state(h2, tol, &r1.vector);
}

// Stage parameters for points on the h_x = h_z line: the first stage is
// detuned by +/- delta (and carries the penalty) so one member of the
// otherwise symmetric manifold is selected; the second stage solves the
// symmetric point warm-started.
inline std::pair<FieldParams, FieldParams> multicritical_init(
    const LatticeGeometry& geom, double h, double delta) {
  (void)geom;
  if (h < 0.0) throw std::invalid_argument("multicritical_init: h must be >= 0");
  if (delta == 0.0)
    throw std::invalid_argument(
        "multicritical_init: delta = 0 leaves the manifold selection undefined");
  FieldParams stage1{h - delta, h + delta, 1.0};
  FieldParams stage2{h, h, 0.0};
  return {stage1, stage2};
}

// In-place orthonormal Walsh-Hadamard transform (the N-qubit Hadamard
// rotation between the Z and X product bases).
inline void walsh_hadamard_transform(std::vector<double>& v) {
  const std::size_t dim = v.size();
  if (dim == 0 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("walsh_hadamard_transform: length not a power of 2");
  for (std::size_t len = 1; len < dim; len <<= 1)
    for (std::size_t blk = 0; blk < dim; blk += 2 * len)
      for (std::size_t i = blk; i < blk + len; ++i) {
        double a = v[i], b = v[i + len];
        v[i] = a + b;
        v[i + len] = a - b;
      }
  double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& x : v) x *= s;
}

// Expectation of a Z-type Pauli string (diagonal).
inline double z_string_expectation(const std::vector<double>& state,
                                   std::uint32_t zmask) {
  double s = 0.0;
  for (std::size_t b = 0; b < state.size(); ++b)
    s += SparseHamiltonian::parity_sign(std::uint32_t(b), zmask) * state[b] *
         state[b];
  return s;
}

// Expectation of an X-type Pauli string (pure bit flip; real state).
inline double x_string_expectation(const std::vector<double>& state,
                                   std::uint32_t xmask) {
  double s = 0.0;
  for (std::size_t b = 0; b < state.size(); ++b)
    s += state[b] * state[b ^ xmask];
  return s;
}

// Draws `count` computational-basis (or X-basis) snapshots from |psi|^2 by
// inverting the cumulative distribution.
inline std::vector<BitVec> sample_snapshots(const std::vector<double>& state,
                                            Basis basis, std::size_t count,
                                            std::mt19937_64& rng) {
  const std::size_t dim = state.size();
  if (dim == 0 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("sample_snapshots: state length not a power of 2");
  int n = std::countr_zero(dim);
  std::vector<double> probs = state;
  double nrm = detail::norm(probs);
  if (std::abs(nrm - 1.0) > 1e-8)
    throw std::invalid_argument("sample_snapshots: state not normalized");
  if (basis == Basis::X) walsh_hadamard_transform(probs);
  double acc = 0.0;
  for (double& p : probs) {
    acc += p * p;
    p = acc;
  }
  probs.back() = 1.0;

  std::vector<BitVec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double u = uniform_unit(rng);
    std::size_t idx =
        std::upper_bound(probs.begin(), probs.end(), u) - probs.begin();
    if (idx >= dim) idx = dim - 1;
    BitVec snap(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q)
      if ((idx >> q) & 1) snap.set(static_cast<std::size_t>(q), true);
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace qcnn
