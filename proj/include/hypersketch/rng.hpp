#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace hypersketch::rng {

// Counter-based generation: every draw is a pure function of
// (stream key, draw index), so any value anywhere in a matrix can be
// recomputed in isolation. That is what makes streamed, parallel and
// repeated sketching produce identical bits without storing matrices.

// Philox 4x32, 10 rounds. Returns the 128-bit block for a 64-bit key and
// 128-bit counter.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_lo,
                                        std::uint64_t ctr_hi);

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

// Derives a child stream key from a base key and a word (layer index,
// point index, purpose tag, ...).
std::uint64_t derive_stream(std::uint64_t base, std::uint64_t word);

// One uniform u64 per (stream, index).
std::uint64_t random_u64(std::uint64_t stream, std::uint64_t index);

// Uniform double in the open interval (0, 1).
double uniform_open(std::uint64_t stream, std::uint64_t index);

// Inverse of the standard normal CDF (Wichura's AS241, ~1 ulp in the
// central region, < 1e-15 relative in the tails reachable from 64-bit
// uniforms). Reference precision; not the sketching path.
double normal_icdf(double p);

// Rational approximation of the same function with relative error below
// 1.2e-9 (Acklam). This is the transform behind gaussian()/gaussian_fill():
// its central branch vectorizes, and the accuracy loss is irrelevant for
// sign decisions.
double normal_icdf_fast(double p);

// Standard normal draw at (stream, index): normal_icdf_fast of the uniform.
double gaussian(std::uint64_t stream, std::uint64_t index);

// Fills `out` with the draws at indices [begin_index, begin_index + size).
void gaussian_fill(std::uint64_t stream, std::uint64_t begin_index, std::span<double> out);

}  // namespace hypersketch::rng
