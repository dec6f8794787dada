#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hypersketch/bitvec.hpp"
#include "hypersketch/planner.hpp"
#include "hypersketch/pointset.hpp"

namespace hypersketch {

// One stage of the cascade. The Gaussian row vectors are never stored: entry
// (row, col) of the projection matrix is a pure function of
// (master_seed, level, row, col), so rows are regenerated on the fly and any
// slice of any layer is recomputable in isolation.
struct CascadeLayer {
  int index = 1;               // 1-based level
  std::uint64_t in_dim = 0;    // d for level 1, previous output dim otherwise
  std::uint64_t out_dim = 0;
  std::uint64_t stream = 0;    // derived from (master_seed, index)
};

CascadeLayer make_layer(const CascadePlan& plan, int level);

// A standalone layer outside any plan, seeded the same way. Used by
// statistical checks that exercise single levels at chosen dimensions.
CascadeLayer make_adhoc_layer(std::uint64_t master_seed, int level, std::uint64_t in_dim,
                              std::uint64_t out_dim);

// Gaussian matrix entry of a layer; exposed for tests and diagnostics.
double layer_gaussian(const CascadeLayer& layer, std::uint64_t row, std::uint64_t col);

namespace detail {
// Sign convention of the whole artifact: sign(0) = +1. Ties have measure
// zero for continuous inputs but show up in crafted tests, so this choice is
// load bearing.
inline bool sign_bit(double t) { return t >= 0.0; }
}  // namespace detail

// Maps x to out_dim sign bits: bit i = sign(<x, Z_i>) with Z_i the i-th
// regenerated Gaussian row. The output depends only on the direction of x.
PackedSignVector sign_feature_map(std::span<const double> x, const CascadeLayer& layer,
                                  int threads = 1);

// Same map on a packed +-1 input (the output of a previous layer). The
// implicit 1/sqrt(D) coordinate scale cannot change any sign, so layers
// consume the raw bit pattern.
PackedSignVector sign_feature_map(const PackedSignVector& x, const CascadeLayer& layer,
                                  int threads = 1);

// Shared-row batched forms: the Gaussian rows are generated once per row and
// applied to every input, which is what makes whole-set sketching affordable.
std::vector<PackedSignVector> sign_feature_map_batch(const std::vector<std::span<const double>>& xs,
                                                     const CascadeLayer& layer, int threads);
std::vector<PackedSignVector> sign_feature_map_batch(const std::vector<PackedSignVector>& xs,
                                                     const CascadeLayer& layer, int threads);

// Applies all levels of the plan to one point (normalized internally in ball
// mode) and returns the final vector of plan.final_dim() bits.
PackedSignVector sketch_point(std::span<const double> x, const CascadePlan& plan,
                              int threads = 1);

// The plan, the per-point packed vectors, and (ball mode) the quantized
// norms: everything the serialized sketch contains.
struct SketchBundle {
  CascadePlan plan;
  std::vector<PackedSignVector> sketches;
  std::vector<std::uint32_t> quantized_norms;  // empty in sphere mode
};

// Sketches every point of the set. Deterministic given the plan's master
// seed, for any thread count.
SketchBundle sketch_set(const PointSet& points, const CascadePlan& plan, int threads = 0);

// Rough operation count of sketch_set for one set (row generation plus dot
// products across all levels). Used to refuse plans that cannot run.
double estimated_sketch_ops(const CascadePlan& plan);

}  // namespace hypersketch
