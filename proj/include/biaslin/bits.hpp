#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "biaslin/error.hpp"

namespace biaslin {

/// Packed point of {0,1}^n, also used for subsets S of [n]. Coordinate j
/// (0-based) lives in bit j % 64 of word j / 64.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t j) const { return (words_[j >> 6] >> (j & 63)) & 1U; }
  void set(std::size_t j, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (j & 63);
    if (v) {
      words_[j >> 6] |= mask;
    } else {
      words_[j >> 6] &= ~mask;
    }
  }
  void flip_all() {
    for (auto& w : words_) w = ~w;
    clear_tail();
  }
  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  /// Parity of |this AND other|.
  bool and_parity(const BitVector& other) const {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
    return std::popcount(acc) & 1;
  }
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  bool operator==(const BitVector&) const = default;

  /// Dense-table index: coordinate 1 (j = 0) is the most significant bit.
  std::uint64_t to_index() const {
    if (n_ > 63) throw SizeError("bit vector too long for a table index");
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < n_; ++j) idx = (idx << 1) | static_cast<std::uint64_t>(get(j));
    return idx;
  }
  static BitVector from_index(std::uint64_t idx, std::size_t n) {
    BitVector v(n);
    for (std::size_t j = 0; j < n; ++j) v.set(j, (idx >> (n - 1 - j)) & 1U);
    return v;
  }
  /// Bits in table order, coordinate 1 leftmost.
  std::string to_string() const {
    std::string s(n_, '0');
    for (std::size_t j = 0; j < n_; ++j) s[j] = get(j) ? '1' : '0';
    return s;
  }

 private:
  void clear_tail() {
    if (n_ % 64 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

using Subset = BitVector;

/// Bit of coordinate j (0-based) inside a k-bit table index, coordinate 0 = MSB.
inline unsigned coord_bit(std::uint64_t idx, unsigned k, unsigned j) {
  return static_cast<unsigned>((idx >> (k - 1 - j)) & 1U);
}

}  // namespace biaslin
