#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hypersketch/harness.hpp"
#include "hypersketch/jl_baseline.hpp"
#include "hypersketch/planner.hpp"

using namespace hypersketch;

TEST_CASE("projected dimension formula") {
  // k = ceil(12 ln n / ((eps/2)^2 - (eps/2)^3))
  CHECK(jl_dimension(100, 0.2) ==
        static_cast<std::uint64_t>(std::ceil(12.0 * std::log(100.0) / (0.01 - 0.001))));
  CHECK_THROWS_AS(jl_dimension(1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(jl_dimension(100, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(jl_dimension(100, 1.0), std::invalid_argument);
}

TEST_CASE("projection is linear, deterministic, and unbiased in squared norm") {
  PointSet set;
  set.mode = Mode::Ball;
  set.n = 2;
  set.d = 8;
  set.data.assign(16, 0.0);
  set.data[0] = 1.0;  // u = e1, second point is the origin... which is invalid
  set.data[8] = 1e-12;  // keep it barely nonzero instead
  const double eps = 0.2;

  const auto a = jl_project(set, eps, 42);
  const auto b = jl_project(set, eps, 42);
  CHECK(a == b);
  const std::uint64_t k = jl_dimension(2, eps);
  REQUIRE(a.size() == 2 * k);

  // Near-zero input projects to near-zero output (linearity).
  double tail = 0.0;
  for (std::uint64_t t = 0; t < k; ++t) tail += a[k + t] * a[k + t];
  CHECK(std::sqrt(tail) < 1e-10);

  // E |v|^2 = |u|^2 over independent seeds, 4 standard error band with
  // Var(|v|^2) = 2/k for a unit input.
  const int seeds = 2000;
  double mean = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto proj = jl_project(set, eps, 1000 + s);
    double sq = 0.0;
    for (std::uint64_t t = 0; t < k; ++t) sq += proj[t] * proj[t];
    mean += sq;
  }
  mean /= seeds;
  const double se = std::sqrt(2.0 / static_cast<double>(k) / seeds);
  CHECK(std::abs(mean - 1.0) <= 4.0 * se);
}

TEST_CASE("quantizer: grid points are fixed, out-of-range coordinates clamp") {
  const std::uint64_t n = 2, k = 4;
  const double m = 1.0, eps = 0.2;
  // Build a matrix whose entries include exact grid points and a 3.0 outlier.
  JlSketch probe = jl_quantize(std::vector<double>(n * k, 0.0), n, k, m, eps);
  const double s = probe.step;
  std::vector<double> mat{0.0, s, -2.0 * s, 10.0 * s, 3.0, -3.0, 0.5 * s, 0.25 * s};
  const auto sk = jl_quantize(mat, n, k, m, eps);
  CHECK(sk.codes[0] == 0);
  CHECK(sk.codes[1] == 1);
  CHECK(sk.codes[2] == -2);
  CHECK(sk.codes[3] == 10);
  // 3.0 clamps to B = 2, then rounds to 2/s.
  CHECK(sk.clamped_count == 2);
  CHECK(sk.codes[4] == std::llround(2.0 / s));
  CHECK(sk.codes[5] == -std::llround(2.0 / s));
  CHECK(sk.bits_per_coord == static_cast<int>(std::ceil(std::log2(4.0 / s + 1.0))));
  CHECK(sk.total_bits == n * k * static_cast<std::uint64_t>(sk.bits_per_coord));
}

TEST_CASE("round-trip decode error stays within the per-point bound") {
  const auto set = gen_ball(20, 16, 0.25, 0.3, 77);
  const double eps = 0.25;
  const auto proj = jl_project(set, eps, 5);
  const std::uint64_t k = jl_dimension(set.n, eps);
  const double m = measure(set).min_dist;  // of normalized points; conservative stand-in
  const auto sk = jl_quantize(proj, set.n, k, m, eps);
  CHECK(sk.clamped_count == 0);
  const double bound = sk.step * std::sqrt(static_cast<double>(k)) / 2.0;
  CHECK(bound <= m * m * (eps / 2.0) / 6.0 + 1e-15);
  for (std::size_t p = 0; p < set.n; ++p) {
    double moved = 0.0;
    for (std::uint64_t t = 0; t < k; ++t) {
      const double diff = proj[p * k + t] - sk.codes[p * k + t] * sk.step;
      moved += diff * diff;
    }
    CHECK(std::sqrt(moved) <= bound + 1e-12);
  }
}

TEST_CASE("squared distance estimates") {
  const std::uint64_t n = 3, k = 2;
  JlSketch sk;
  sk.n = n;
  sk.k = k;
  sk.step = 0.5;
  sk.codes = {0, 0, 2, 0, 0, 2};  // decoded points (0,0), (1,0), (0,1)
  CHECK(jl_estimate_sq_dist(sk, 0, 0) == 0.0);
  CHECK(jl_estimate_sq_dist(sk, 0, 1) == 1.0);
  CHECK(jl_estimate_sq_dist(sk, 1, 2) == 2.0);
  CHECK(jl_estimate_sq_dist(sk, 2, 1) == 2.0);
  CHECK_THROWS_AS(jl_estimate_sq_dist(sk, 0, 3), std::out_of_range);
}

TEST_CASE("bit accounting shortcut matches the materialized sketch") {
  const auto set = gen_ball(12, 8, 0.5, 0.3, 3);
  const double eps = 0.3, m = 0.7;
  const auto proj = jl_project(set, eps, 1);
  const std::uint64_t k = jl_dimension(set.n, eps);
  const auto sk = jl_quantize(proj, set.n, k, m, eps);
  CHECK(jl_bits_per_point(set.n, m, eps) * set.n == sk.total_bits);
  CHECK(jl_bits_per_coordinate(k, m, eps) == sk.bits_per_coord);
}
