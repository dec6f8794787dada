#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hypersketch {

// N signs in {-1,+1} stored one bit each, LSB-first within little-endian
// 64-bit words. Bit i set means sign +1. The 1/sqrt(N) normalization of the
// sketch coordinates is implicit and never stored. Trailing bits beyond N
// are kept zero; the word layout is exactly what the sketch file format
// writes to disk.
class PackedSignVector {
 public:
  PackedSignVector() = default;
  explicit PackedSignVector(std::uint64_t nbits);

  // signs must contain only -1 and +1.
  static PackedSignVector pack(std::span<const int> signs);

  std::uint64_t nbits() const { return nbits_; }
  std::size_t word_count() const { return words_.size(); }
  std::span<const std::uint64_t> words() const { return words_; }
  std::uint64_t* word_data() { return words_.data(); }

  bool bit(std::uint64_t i) const;
  void set_bit(std::uint64_t i, bool plus);
  int sign(std::uint64_t i) const { return bit(i) ? +1 : -1; }

  bool operator==(const PackedSignVector& other) const = default;

 private:
  std::uint64_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

// Number of positions where the first nbits of a and b differ.
std::uint64_t hamming(const PackedSignVector& a, const PackedSignVector& b);

// Inner product of the two unit-normalized sign vectors:
// (agreements - disagreements) / N = 1 - 2*hamming/N, computed in integer
// arithmetic with a single final division. Always in [-1, 1], and exactly
// 1 for a == b.
double inner_product(const PackedSignVector& a, const PackedSignVector& b);

}  // namespace hypersketch
