#pragma once

#include <cstdint>
#include <vector>

#include "hypersketch/bitvec.hpp"
#include "hypersketch/cascade.hpp"

namespace hypersketch {

// Decodes the inner product of the original unit vectors from two level-L
// sketches: sine_map_iter(inner_product(a, b), L).
double estimate_inner_sphere(const PackedSignVector& a, const PackedSignVector& b, int levels);

// 2 - 2 * estimate_inner_sphere(a, b, L); in [0, 4].
double estimate_sq_dist_sphere(const PackedSignVector& a, const PackedSignVector& b, int levels);

struct BallEstimate {
  double sq_dist = 0.0;  // clamped at 0
  double raw = 0.0;      // unclamped value, kept for diagnostics
};

// nx^2 + ny^2 - 2*nx*ny*sine_map_iter(inner_product(a, b), L) for sketches of
// the normalized directions and reconstructed norms nx, ny in (0, 1].
BallEstimate estimate_sq_dist_ball(const PackedSignVector& a, const PackedSignVector& b,
                                   int levels, double nx, double ny);

struct PairEstimate {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double est_sq_dist = 0.0;
  double est_inner = 0.0;  // decoded inner product of the (normalized) points
};

double reconstructed_norm(const CascadePlan& plan, std::uint32_t index);

// All n(n-1)/2 pairs of the bundle, dispatching on its mode. Pairs are
// evaluated lazily from the packed vectors; nothing quadratic is stored
// beyond the returned list.
std::vector<PairEstimate> estimate_all(const SketchBundle& bundle);

}  // namespace hypersketch
