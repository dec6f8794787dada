#include "hypersketch/jl_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hypersketch/rng.hpp"

namespace hypersketch {

namespace {

constexpr std::uint64_t kJlDomain = 0x6a6c70726f6aull;  // stream namespace for projections
constexpr double kCoordRange = 2.0;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("jl: epsilon must be in (0, 1)");
  }
}

double grid_step(std::uint64_t k, double min_dist, double epsilon) {
  if (!(min_dist > 0.0) || min_dist > 2.0) {
    throw std::invalid_argument("jl: min_dist must be in (0, 2]");
  }
  return min_dist * min_dist * (epsilon / 2.0) / (3.0 * std::sqrt(static_cast<double>(k)));
}

}  // namespace

std::uint64_t jl_dimension(std::uint64_t n, double epsilon) {
  check_epsilon(epsilon);
  if (n < 2) throw std::invalid_argument("jl_dimension: n must be >= 2");
  const double half = epsilon / 2.0;
  const double denom = half * half - half * half * half;
  return static_cast<std::uint64_t>(
      std::ceil(12.0 * std::log(static_cast<double>(n)) / denom));
}

std::vector<double> jl_project(const PointSet& points, double epsilon, std::uint64_t seed) {
  check_epsilon(epsilon);
  validate_point_set(points);
  const std::uint64_t k = jl_dimension(points.n, epsilon);
  const std::uint64_t stream = rng::derive_stream(seed, kJlDomain);

  std::vector<double> out(points.n * k, 0.0);
  std::vector<double> row(k);
  for (std::size_t i = 0; i < points.d; ++i) {
    rng::gaussian_fill(rng::derive_stream(stream, i), 0, row);
    for (std::size_t p = 0; p < points.n; ++p) {
      const double c = points.data[p * points.d + i];
      if (c == 0.0) continue;
      double* dst = out.data() + p * k;
      for (std::uint64_t t = 0; t < k; ++t) dst[t] += c * row[t];
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (double& v : out) v *= scale;
  return out;
}

JlSketch jl_quantize(const std::vector<double>& projected, std::uint64_t n, std::uint64_t k,
                     double min_dist, double epsilon) {
  check_epsilon(epsilon);
  if (projected.size() != n * k) {
    throw std::invalid_argument("jl_quantize: matrix size does not match n*k");
  }
  JlSketch sk;
  sk.n = n;
  sk.k = k;
  sk.coord_range = kCoordRange;
  sk.step = grid_step(k, min_dist, epsilon);
  const double levels = 2.0 * kCoordRange / sk.step + 1.0;
  sk.bits_per_coord = static_cast<int>(std::ceil(std::log2(levels)));
  sk.total_bits = n * k * static_cast<std::uint64_t>(sk.bits_per_coord);
  if (kCoordRange / sk.step > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    throw std::invalid_argument("jl_quantize: grid too fine for 32-bit codes");
  }
  sk.codes.resize(projected.size());
  for (std::size_t i = 0; i < projected.size(); ++i) {
    double c = projected[i];
    if (c > kCoordRange) {
      c = kCoordRange;
      ++sk.clamped_count;
    } else if (c < -kCoordRange) {
      c = -kCoordRange;
      ++sk.clamped_count;
    }
    sk.codes[i] = static_cast<std::int32_t>(std::llround(c / sk.step));
  }
  return sk;
}

double jl_estimate_sq_dist(const JlSketch& sketch, std::size_t i, std::size_t j) {
  if (i >= sketch.n || j >= sketch.n) {
    throw std::out_of_range("jl_estimate_sq_dist: index out of range");
  }
  const std::int32_t* a = sketch.codes.data() + i * sketch.k;
  const std::int32_t* b = sketch.codes.data() + j * sketch.k;
  double s = 0.0;
  for (std::uint64_t t = 0; t < sketch.k; ++t) {
    const double diff = (static_cast<double>(a[t]) - static_cast<double>(b[t])) * sketch.step;
    s += diff * diff;
  }
  return s;
}

int jl_bits_per_coordinate(std::uint64_t k, double min_dist, double epsilon) {
  check_epsilon(epsilon);
  const double s = grid_step(k, min_dist, epsilon);
  return static_cast<int>(std::ceil(std::log2(2.0 * kCoordRange / s + 1.0)));
}

std::uint64_t jl_bits_per_point(std::uint64_t n, double min_dist, double epsilon) {
  const std::uint64_t k = jl_dimension(n, epsilon);
  return k * static_cast<std::uint64_t>(jl_bits_per_coordinate(k, min_dist, epsilon));
}

}  // namespace hypersketch
