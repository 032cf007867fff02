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
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qcnn {

// Fixed-size bit vector packed into 64-bit words, least significant bit
// first. Bits at positions >= size() are kept zero as an invariant so that
// word-level operations (popcount, equality, xor) need no masking.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : n_(nbits), w_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  std::size_t word_count() const { return w_.size(); }
  const std::uint64_t* words() const { return w_.data(); }
  std::uint64_t* words() { return w_.data(); }

  bool get(std::size_t i) const {
    assert(i < n_);
    return (w_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool v) {
    assert(i < n_);
    std::uint64_t m = std::uint64_t(1) << (i & 63);
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }
  void toggle(std::size_t i) {
    assert(i < n_);
    w_[i >> 6] ^= std::uint64_t(1) << (i & 63);
  }

  void clear() { std::fill(w_.begin(), w_.end(), 0); }

  bool any() const {
    for (std::uint64_t w : w_)
      if (w) return true;
    return false;
  }

  std::size_t popcount() const {
    std::size_t c = 0;
    for (std::uint64_t w : w_) c += std::popcount(w);
    return c;
  }

  void xor_with(const BitVec& o) {
    assert(o.n_ == n_);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  }

  bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const BitVec& o) const { return !(*this == o); }

  // Calls f(i) for every set bit, in increasing position order.
  template <typename F>
  void for_each_set(F&& f) const {
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      std::uint64_t w = w_[wi];
      while (w) {
        unsigned b = std::countr_zero(w);
        f(wi * 64 + b);
        w &= w - 1;
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

namespace bits {

inline bool get(const std::uint64_t* w, std::size_t i) {
  return (w[i >> 6] >> (i & 63)) & 1u;
}

inline void set(std::uint64_t* w, std::size_t i, bool v) {
  std::uint64_t m = std::uint64_t(1) << (i & 63);
  if (v)
    w[i >> 6] |= m;
  else
    w[i >> 6] &= ~m;
}

// dst[j] = src[(j + k) mod nbits] for small k. src and dst are nw-word
// buffers holding an nbits-wide row; bits above nbits must be zero and stay
// zero. dst must not alias src.
inline void gather_offset_pos(std::uint64_t* dst, const std::uint64_t* src,
                              std::size_t nbits, unsigned k) {
  assert(k >= 1 && k < 64 && nbits > k);
  std::size_t nw = (nbits + 63) / 64;
  for (std::size_t i = 0; i + 1 < nw; ++i)
    dst[i] = (src[i] >> k) | (src[i + 1] << (64 - k));
  dst[nw - 1] = src[nw - 1] >> k;
  for (unsigned t = 0; t < k; ++t) set(dst, nbits - k + t, get(src, t));
}

// dst[j] = src[(j - k) mod nbits] for small k.
inline void gather_offset_neg(std::uint64_t* dst, const std::uint64_t* src,
                              std::size_t nbits, unsigned k) {
  assert(k >= 1 && k < 64 && nbits > k);
  std::size_t nw = (nbits + 63) / 64;
  for (std::size_t i = nw; i-- > 1;)
    dst[i] = (src[i] << k) | (src[i - 1] >> (64 - k));
  dst[0] = src[0] << k;
  for (unsigned t = 0; t < k; ++t) set(dst, t, get(src, nbits - k + t));
  // The left shift can smear bits past nbits; restore the invariant.
  unsigned tail = nbits & 63;
  if (tail) dst[nw - 1] &= (std::uint64_t(1) << tail) - 1;
}

// dst[j] = src[(j + shift) mod nbits], shift in [-2, 2].
inline void gather_offset(std::uint64_t* dst, const std::uint64_t* src,
                          std::size_t nbits, int shift) {
  if (shift > 0)
    gather_offset_pos(dst, src, nbits, unsigned(shift));
  else if (shift < 0)
    gather_offset_neg(dst, src, nbits, unsigned(-shift));
  else
    std::copy(src, src + (nbits + 63) / 64, dst);
}

}  // namespace bits
}  // namespace qcnn
