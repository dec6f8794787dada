#include "hypersketch/cascade.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

#include "hypersketch/errors.hpp"
#include "hypersketch/parallel.hpp"
#include "hypersketch/rng.hpp"

namespace hypersketch {

namespace {

constexpr std::uint64_t kLayerDomain = 0x6c61796572ull;  // stream namespace for layers

std::uint64_t layer_stream(std::uint64_t master_seed, int level) {
  return rng::derive_stream(rng::derive_stream(master_seed, kLayerDomain),
                            static_cast<std::uint64_t>(level));
}

// Applies one layer to n inputs given as a column-major matrix
// (columns[k * n + p] = coordinate k of input p). For every output row the
// Gaussian row is generated once and accumulated across all inputs; the
// per-input sum runs over k in a fixed order, so the produced bits do not
// depend on the batch size or the thread count. Bit (64*g + b) of out[p] is
// the sign of the dot product against output row 64*g + b. Accumulation is
// single precision: the decision is a sign, and inputs are unit scale.
void apply_rows(const std::vector<float>& columns, std::uint64_t in_dim,
                const CascadeLayer& layer, std::size_t n, std::vector<PackedSignVector>& out,
                int threads) {
  const std::uint64_t out_dim = layer.out_dim;
  const std::uint64_t groups = (out_dim + 63) / 64;
  parallel_for_aligned(0, groups, 1, threads, [&](std::uint64_t g0, std::uint64_t g1) {
    std::vector<double> gaussians(in_dim);
    std::vector<float> row32(in_dim);
    std::vector<float> sums(n);
    std::vector<std::uint64_t> bits(n);
    for (std::uint64_t g = g0; g < g1; ++g) {
      std::fill(bits.begin(), bits.end(), 0);
      const int rows = static_cast<int>(std::min<std::uint64_t>(64, out_dim - g * 64));
      for (int b = 0; b < rows; ++b) {
        const std::uint64_t row = g * 64 + b;
        rng::gaussian_fill(rng::derive_stream(layer.stream, row), 0, gaussians);
        for (std::uint64_t k = 0; k < in_dim; ++k) {
          row32[k] = static_cast<float>(gaussians[k]);
        }
        std::fill(sums.begin(), sums.end(), 0.0f);
        // Four columns per pass to cut the load/store traffic on sums.
        float* __restrict acc = sums.data();
        std::uint64_t k = 0;
        for (; k + 4 <= in_dim; k += 4) {
          const float g0 = row32[k];
          const float g1 = row32[k + 1];
          const float g2 = row32[k + 2];
          const float g3 = row32[k + 3];
          const float* __restrict col = columns.data() + k * n;
          for (std::size_t p = 0; p < n; ++p) {
            acc[p] += g0 * col[p] + g1 * col[n + p] + g2 * col[2 * n + p] +
                      g3 * col[3 * n + p];
          }
        }
        for (; k < in_dim; ++k) {
          const float gk = row32[k];
          const float* __restrict col = columns.data() + k * n;
          for (std::size_t p = 0; p < n; ++p) acc[p] += gk * col[p];
        }
        for (std::size_t p = 0; p < n; ++p) {
          bits[p] |= static_cast<std::uint64_t>(sums[p] >= 0.0f) << b;
        }
      }
      for (std::size_t p = 0; p < n; ++p) out[p].word_data()[g] = bits[p];
    }
  });
}

std::vector<PackedSignVector> make_outputs(std::size_t n, std::uint64_t out_dim) {
  std::vector<PackedSignVector> out;
  out.reserve(n);
  for (std::size_t p = 0; p < n; ++p) out.emplace_back(out_dim);
  return out;
}

}  // namespace

CascadeLayer make_layer(const CascadePlan& plan, int level) {
  if (level < 1 || level > plan.levels) {
    throw std::invalid_argument("make_layer: level out of range");
  }
  CascadeLayer layer;
  layer.index = level;
  layer.in_dim = level == 1 ? plan.d : plan.dims[level - 2];
  layer.out_dim = plan.dims[level - 1];
  layer.stream = layer_stream(plan.master_seed, level);
  return layer;
}

CascadeLayer make_adhoc_layer(std::uint64_t master_seed, int level, std::uint64_t in_dim,
                              std::uint64_t out_dim) {
  if (level < 1 || in_dim == 0 || out_dim == 0) {
    throw std::invalid_argument("make_adhoc_layer: bad arguments");
  }
  return CascadeLayer{level, in_dim, out_dim, layer_stream(master_seed, level)};
}

double layer_gaussian(const CascadeLayer& layer, std::uint64_t row, std::uint64_t col) {
  if (row >= layer.out_dim || col >= layer.in_dim) {
    throw std::out_of_range("layer_gaussian: entry out of range");
  }
  return rng::gaussian(rng::derive_stream(layer.stream, row), col);
}

std::vector<PackedSignVector> sign_feature_map_batch(
    const std::vector<std::span<const double>>& xs, const CascadeLayer& layer, int threads) {
  const std::size_t n = xs.size();
  for (const auto& x : xs) {
    if (x.size() != layer.in_dim) {
      throw std::invalid_argument("sign_feature_map: input has dimension " +
                                  std::to_string(x.size()) + ", layer expects " +
                                  std::to_string(layer.in_dim));
    }
    double sq = 0.0;
    for (double v : x) sq += v * v;
    if (!(sq > 0.0)) throw std::invalid_argument("sign_feature_map: zero input vector");
  }
  std::vector<float> columns(layer.in_dim * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::uint64_t k = 0; k < layer.in_dim; ++k) columns[k * n + p] = static_cast<float>(xs[p][k]);
  }
  auto out = make_outputs(n, layer.out_dim);
  apply_rows(columns, layer.in_dim, layer, n, out, threads);
  return out;
}

std::vector<PackedSignVector> sign_feature_map_batch(const std::vector<PackedSignVector>& xs,
                                                     const CascadeLayer& layer, int threads) {
  const std::size_t n = xs.size();
  for (const auto& x : xs) {
    if (x.nbits() != layer.in_dim) {
      throw std::invalid_argument("sign_feature_map: packed input has " +
                                  std::to_string(x.nbits()) + " bits, layer expects " +
                                  std::to_string(layer.in_dim));
    }
  }
  // Unpack to +-1 columns; the implicit 1/sqrt(D) scale cannot change signs,
  // so layers consume the raw bit pattern.
  std::vector<float> columns(layer.in_dim * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::uint64_t k = 0; k < layer.in_dim; ++k) {
      columns[k * n + p] = xs[p].bit(k) ? 1.0f : -1.0f;
    }
  }
  auto out = make_outputs(n, layer.out_dim);
  apply_rows(columns, layer.in_dim, layer, n, out, threads);
  return out;
}

PackedSignVector sign_feature_map(std::span<const double> x, const CascadeLayer& layer,
                                  int threads) {
  return std::move(sign_feature_map_batch(std::vector<std::span<const double>>{x}, layer,
                                          threads)[0]);
}

PackedSignVector sign_feature_map(const PackedSignVector& x, const CascadeLayer& layer,
                                  int threads) {
  return std::move(sign_feature_map_batch(std::vector<PackedSignVector>{x}, layer, threads)[0]);
}

namespace {

std::vector<PackedSignVector> run_cascade(const std::vector<std::span<const double>>& inputs,
                                          const CascadePlan& plan, int threads) {
  if (plan.dims_saturated) {
    throw InfeasibleError("sketching refused: the dimension schedule exceeds the u64 range",
                          std::numeric_limits<double>::infinity(), 0.0);
  }
  auto current = sign_feature_map_batch(inputs, make_layer(plan, 1), threads);
  for (int level = 2; level <= plan.levels; ++level) {
    current = sign_feature_map_batch(current, make_layer(plan, level), threads);
  }
  return current;
}

}  // namespace

PackedSignVector sketch_point(std::span<const double> x, const CascadePlan& plan, int threads) {
  std::vector<double> unit;
  std::span<const double> input = x;
  if (plan.mode == Mode::Ball) {
    const double nrm = norm(x);
    if (!(nrm > 0.0)) throw std::invalid_argument("sketch_point: zero vector");
    unit.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) unit[k] = x[k] / nrm;
    input = unit;
  }
  return std::move(run_cascade({input}, plan, threads)[0]);
}

SketchBundle sketch_set(const PointSet& points, const CascadePlan& plan, int threads) {
  validate_point_set(points);
  if (points.n != plan.n || points.d != plan.d || points.mode != plan.mode) {
    throw std::invalid_argument("sketch_set: point set does not match the plan");
  }
  if (threads <= 0) threads = default_threads();

  SketchBundle bundle;
  bundle.plan = plan;

  std::vector<double> unit;
  std::vector<std::span<const double>> inputs(points.n);
  if (plan.mode == Mode::Ball) {
    unit.resize(points.data.size());
    for (std::size_t i = 0; i < points.n; ++i) {
      const auto x = points.point(i);
      const double nrm = norm(x);
      for (std::size_t k = 0; k < points.d; ++k) unit[i * points.d + k] = x[k] / nrm;
      inputs[i] = {unit.data() + i * points.d, points.d};
    }
    bundle.quantized_norms.resize(points.n);
    for (std::size_t i = 0; i < points.n; ++i) {
      const double nrm = norm(points.point(i));
      const double idx = std::round(nrm / plan.norm_step);
      if (idx > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
        throw InfeasibleError("norm quantizer index exceeds the u32 range of the format", idx,
                              static_cast<double>(std::numeric_limits<std::uint32_t>::max()));
      }
      bundle.quantized_norms[i] = static_cast<std::uint32_t>(idx);
    }
  } else {
    for (std::size_t i = 0; i < points.n; ++i) inputs[i] = points.point(i);
  }

  bundle.sketches = run_cascade(inputs, plan, threads);
  return bundle;
}

double estimated_sketch_ops(const CascadePlan& plan) {
  double ops = 0.0;
  double in_dim = static_cast<double>(plan.d);
  for (int level = 1; level <= plan.levels; ++level) {
    const double out_dim = static_cast<double>(plan.dims[level - 1]);
    // Per row: in_dim Gaussian draws plus one in_dim-length dot per point.
    ops += out_dim * in_dim * (1.0 + static_cast<double>(plan.n));
    in_dim = out_dim;
  }
  return ops;
}

}  // namespace hypersketch
