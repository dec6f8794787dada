#include "hypersketch/bitvec.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace hypersketch {

PackedSignVector::PackedSignVector(std::uint64_t nbits) : nbits_(nbits) {
  if (nbits == 0) throw std::invalid_argument("PackedSignVector: nbits must be positive");
  words_.assign((nbits + 63) / 64, 0);
}

PackedSignVector PackedSignVector::pack(std::span<const int> signs) {
  PackedSignVector v(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) {
      throw std::invalid_argument("PackedSignVector::pack: entries must be -1 or +1");
    }
    if (signs[i] == 1) v.words_[i >> 6] |= 1ull << (i & 63);
  }
  return v;
}

bool PackedSignVector::bit(std::uint64_t i) const {
  if (i >= nbits_) throw std::out_of_range("PackedSignVector::bit: index out of range");
  return (words_[i >> 6] >> (i & 63)) & 1u;
}

void PackedSignVector::set_bit(std::uint64_t i, bool plus) {
  if (i >= nbits_) throw std::out_of_range("PackedSignVector::set_bit: index out of range");
  const std::uint64_t mask = 1ull << (i & 63);
  if (plus) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::uint64_t hamming(const PackedSignVector& a, const PackedSignVector& b) {
  if (a.nbits() != b.nbits()) {
    throw std::invalid_argument("hamming: dimension mismatch (" + std::to_string(a.nbits()) +
                                " vs " + std::to_string(b.nbits()) + ")");
  }
  const auto wa = a.words();
  const auto wb = b.words();
  std::uint64_t dist = 0;
  for (std::size_t w = 0; w < wa.size(); ++w) {
    dist += std::popcount(wa[w] ^ wb[w]);
  }
  return dist;  // padding bits agree (both zero), so no masking needed
}

double inner_product(const PackedSignVector& a, const PackedSignVector& b) {
  const std::uint64_t n = a.nbits();
  const std::uint64_t dist = hamming(a, b);
  const std::int64_t agree_minus_disagree =
      static_cast<std::int64_t>(n) - 2 * static_cast<std::int64_t>(dist);
  return static_cast<double>(agree_minus_disagree) / static_cast<double>(n);
}

}  // namespace hypersketch
