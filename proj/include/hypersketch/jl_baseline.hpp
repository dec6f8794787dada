#pragma once

#include <cstdint>
#include <vector>

#include "hypersketch/pointset.hpp"

namespace hypersketch {

// Comparison baseline: Gaussian random projection followed by coordinate
// quantization on a uniform grid. The accuracy budget is split evenly:
// the projected dimension k targets (1 +- eps/2) on all pairwise squared
// distances, and the grid step is fine enough that rounding moves squared
// distances by at most an additive m^2 * eps/2, which is multiplicative
// (1 +- eps/2) on pairs at distance >= m.

// k = ceil(12 ln n / ((eps/2)^2 - (eps/2)^3)): per-pair tail 2/n^3 under the
// Gaussian projection bound, union over n^2/2 pairs leaves failure <= 2/n.
std::uint64_t jl_dimension(std::uint64_t n, double epsilon);

// Projects every point to R^k with a seeded Gaussian matrix, scaled 1/sqrt(k).
// Returns the n x k row-major matrix. Deterministic per seed.
std::vector<double> jl_project(const PointSet& points, double epsilon, std::uint64_t seed);

struct JlSketch {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double step = 0.0;         // grid step s
  double coord_range = 2.0;  // symmetric clamp bound B
  std::vector<std::int32_t> codes;  // n x k grid indices
  std::uint64_t clamped_count = 0;  // coordinates that hit the clamp
  int bits_per_coord = 0;           // ceil(log2(2B/s + 1))
  std::uint64_t total_bits = 0;     // n * k * bits_per_coord
};

// Clamps coordinates to [-B, B] with B = 2 and rounds to the grid of step
// s = m^2 (eps/2) / (3 sqrt(k)), so each point moves by at most
// s*sqrt(k)/2 = m^2 (eps/2) / 6 in Euclidean norm.
JlSketch jl_quantize(const std::vector<double>& projected, std::uint64_t n, std::uint64_t k,
                     double min_dist, double epsilon);

// Squared Euclidean distance between the decoded grid points i and j.
double jl_estimate_sq_dist(const JlSketch& sketch, std::size_t i, std::size_t j);

// Bit accounting without materializing codes; used for budget sweeps.
int jl_bits_per_coordinate(std::uint64_t k, double min_dist, double epsilon);
std::uint64_t jl_bits_per_point(std::uint64_t n, double min_dist, double epsilon);

}  // namespace hypersketch
