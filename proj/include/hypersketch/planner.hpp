#pragma once

#include <cstdint>
#include <vector>

#include "hypersketch/pointset.hpp"

namespace hypersketch {

// Quantities measured from a point set by a brute-force O(n^2) pass, after
// normalizing every point to the unit sphere.
struct Measurements {
  double min_dist = 0.0;      // min pairwise distance of normalized points
  double min_gap = 0.0;       // min over pairs of 1 - |<x,y>| (normalized)
  double r = 0.0;             // 2 / sqrt(min_gap)
  double min_sq_norm = 0.0;   // min |x|^2 of the original points (1 in sphere mode)
  std::size_t min_dist_i = 0, min_dist_j = 0;
  std::size_t min_gap_i = 0, min_gap_j = 0;
};

Measurements measure(const PointSet& points);

struct PlannerOptions {
  // Dimension constant of the final level: N = ceil(n_constant * (pi/sqrt2)^(2L)
  // * ln(n) / eps_working^2). The per-level schedule uses n_constant/2 as its
  // uniform constant, which makes the last level of the schedule equal N.
  double n_constant = 48.0;
};

// Every derived parameter of a sketch. A pure function of
// (points, epsilon, master_seed, options): identical inputs give identical
// plans byte for byte.
struct CascadePlan {
  Mode mode = Mode::Sphere;
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  double epsilon = 0.0;
  double eps_working = 0.0;  // epsilon/4 (sphere) or epsilon/32 (ball)
  double min_dist = 0.0;     // m
  double r = 0.0;
  double min_sq_norm = 1.0;  // rho
  int levels = 1;            // L
  double delta = 0.0;        // per-level target
  std::vector<std::uint64_t> dims;  // D_1..D_L, dims.back() = N
  bool dims_saturated = false;      // some D_j exceeded the u64 range
  double norm_step = 0.0;           // ball quantizer step, 0 in sphere mode
  std::uint64_t master_seed = 0;
  double n_constant = 48.0;

  std::uint64_t final_dim() const { return dims.back(); }
};

// Number of cascade levels for a given minimum normalized distance:
// max(1, ceil(log2 log2 (4/m))).
int levels_for_min_dist(double min_dist);

double working_epsilon(Mode mode, double epsilon);

// Per-level inner product tolerance: delta / (2^(L-j) * r^(3((2/3)^j-(2/3)^L))).
double level_error_bound(const CascadePlan& plan, int level);

// D_j = ceil( (n_constant/2) * 2^(2(L-j)) * r^(6((2/3)^j-(2/3)^L)) * ln(n)
//             / delta^2 ), saturated at the u64 range.
std::vector<std::uint64_t> dimension_schedule(int levels, double r, std::uint64_t n,
                                              double delta, double n_constant,
                                              bool* saturated = nullptr);

// Measures the point set and derives the full plan. Requires
// 0 < epsilon < min over pairs of 1 - |<x,y>| on the normalized points;
// violations throw PreconditionError naming the offending pair.
CascadePlan make_plan(const PointSet& points, double epsilon, std::uint64_t master_seed,
                      const PlannerOptions& options = {});

// Same derivation from explicit measurements instead of a point set. Used for
// bit-budget sweeps over hypothetical instances; performs only the parameter
// level consistency checks (epsilon < 4/r^2), not per-pair checks.
CascadePlan plan_from_measurements(Mode mode, std::uint64_t n, std::uint64_t d, double min_dist,
                                   double r, double min_sq_norm, double epsilon,
                                   std::uint64_t master_seed, const PlannerOptions& options = {});

// Bits per stored norm in ball mode: ceil(log2(1/norm_step)); 0 in sphere mode.
int norm_bits(const CascadePlan& plan);

// n*N bits, plus n*norm_bits in ball mode. Saturates at the u64 range.
std::uint64_t bit_budget(const CascadePlan& plan);

}  // namespace hypersketch
