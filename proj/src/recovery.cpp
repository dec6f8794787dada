#include "hypersketch/recovery.hpp"

#include <algorithm>
#include <stdexcept>

#include "hypersketch/iterates.hpp"

namespace hypersketch {

double estimate_inner_sphere(const PackedSignVector& a, const PackedSignVector& b, int levels) {
  return sine_map_iter(inner_product(a, b), levels);
}

double estimate_sq_dist_sphere(const PackedSignVector& a, const PackedSignVector& b,
                               int levels) {
  return 2.0 - 2.0 * estimate_inner_sphere(a, b, levels);
}

BallEstimate estimate_sq_dist_ball(const PackedSignVector& a, const PackedSignVector& b,
                                   int levels, double nx, double ny) {
  if (!(nx > 0.0) || !(ny > 0.0)) {
    throw std::invalid_argument("estimate_sq_dist_ball: norms must be positive");
  }
  const double g = sine_map_iter(inner_product(a, b), levels);
  BallEstimate est;
  est.raw = nx * nx + ny * ny - 2.0 * nx * ny * g;
  est.sq_dist = std::max(0.0, est.raw);
  return est;
}

double reconstructed_norm(const CascadePlan& plan, std::uint32_t index) {
  return static_cast<double>(index) * plan.norm_step;
}

std::vector<PairEstimate> estimate_all(const SketchBundle& bundle) {
  const std::size_t n = bundle.sketches.size();
  const int levels = bundle.plan.levels;
  const bool ball = bundle.plan.mode == Mode::Ball;
  if (ball && bundle.quantized_norms.size() != n) {
    throw std::invalid_argument("estimate_all: bundle is missing quantized norms");
  }
  std::vector<PairEstimate> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      PairEstimate pe;
      pe.i = static_cast<std::uint32_t>(i);
      pe.j = static_cast<std::uint32_t>(j);
      pe.est_inner = estimate_inner_sphere(bundle.sketches[i], bundle.sketches[j], levels);
      if (ball) {
        const double nx = reconstructed_norm(bundle.plan, bundle.quantized_norms[i]);
        const double ny = reconstructed_norm(bundle.plan, bundle.quantized_norms[j]);
        pe.est_sq_dist = estimate_sq_dist_ball(bundle.sketches[i], bundle.sketches[j], levels,
                                               nx, ny)
                             .sq_dist;
      } else {
        pe.est_sq_dist = 2.0 - 2.0 * pe.est_inner;
      }
      out.push_back(pe);
    }
  }
  return out;
}

}  // namespace hypersketch
