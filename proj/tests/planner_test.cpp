#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hypersketch/errors.hpp"
#include "hypersketch/harness.hpp"
#include "hypersketch/io.hpp"
#include "hypersketch/planner.hpp"
#include "hypersketch/rng.hpp"

using namespace hypersketch;

namespace {

PointSet two_unit_axes() {
  PointSet set;
  set.mode = Mode::Sphere;
  set.n = 2;
  set.d = 3;
  set.data = {1, 0, 0, 0, 1, 0};
  return set;
}

}  // namespace

TEST_CASE("measure on orthogonal unit vectors") {
  const auto ms = measure(two_unit_axes());
  CHECK(ms.min_dist == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));
  CHECK(ms.r == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ms.min_sq_norm == 1.0);
  CHECK(ms.min_gap == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("antipodal pairs are degenerate") {
  PointSet set;
  set.mode = Mode::Sphere;
  set.n = 3;
  set.d = 2;
  set.data = {1, 0, -1, 0, 0, 1};
  CHECK_THROWS_AS(measure(set), DegenerateInputError);
  try {
    measure(set);
  } catch (const DegenerateInputError& e) {
    CHECK(e.pair_i == 0);
    CHECK(e.pair_j == 1);
  }
}

TEST_CASE("measure matches a naive double loop on a random set") {
  const auto set = gen_ball(50, 16, 0.4, 0.2, 321);
  const auto ms = measure(set);

  // Independent re-derivation straight from the raw coordinates.
  double min_dist = 1e300, min_gap = 1e300, min_sq_norm = 1e300;
  std::vector<double> unit(set.data);
  for (std::size_t i = 0; i < set.n; ++i) {
    double nn = 0.0;
    for (std::size_t k = 0; k < set.d; ++k) nn += set.data[i * set.d + k] * set.data[i * set.d + k];
    min_sq_norm = std::min(min_sq_norm, nn);
    for (std::size_t k = 0; k < set.d; ++k) unit[i * set.d + k] /= std::sqrt(nn);
  }
  for (std::size_t i = 0; i < set.n; ++i) {
    for (std::size_t j = i + 1; j < set.n; ++j) {
      double dd = 0.0, ip = 0.0;
      for (std::size_t k = 0; k < set.d; ++k) {
        const double a = unit[i * set.d + k], b = unit[j * set.d + k];
        dd += (a - b) * (a - b);
        ip += a * b;
      }
      min_dist = std::min(min_dist, std::sqrt(dd));
      min_gap = std::min(min_gap, 1.0 - std::abs(ip));
    }
  }
  CHECK(ms.min_dist == doctest::Approx(min_dist).epsilon(1e-12));
  CHECK(ms.min_gap == doctest::Approx(min_gap).epsilon(1e-12));
  CHECK(ms.min_sq_norm == doctest::Approx(min_sq_norm).epsilon(1e-12));
  CHECK(ms.r == doctest::Approx(2.0 / std::sqrt(min_gap)).epsilon(1e-12));
}

TEST_CASE("level count from the minimum distance") {
  CHECK(levels_for_min_dist(0.25) == 2);
  CHECK(levels_for_min_dist(std::numbers::sqrt2) == 1);
  CHECK(levels_for_min_dist(0.01) == 4);
  CHECK(levels_for_min_dist(1.9) == 1);  // floored at 1
  CHECK(levels_for_min_dist(1.0) == 1);
  CHECK(levels_for_min_dist(0.999999) == 2);
  CHECK_THROWS_AS(levels_for_min_dist(0.0), std::invalid_argument);
  CHECK_THROWS_AS(levels_for_min_dist(2.0), std::invalid_argument);
}

TEST_CASE("plan derives the documented schedule") {
  // A pair at distance exactly 0.45 forces two levels.
  const auto set = gen_close_pairs(50, 16, 0.45, 11);
  const double eps = 0.05;
  const auto plan = make_plan(set, eps, 99);
  const auto ms = measure(set);

  CHECK(plan.levels == 2);
  CHECK(plan.eps_working == eps / 4.0);
  CHECK(plan.master_seed == 99);
  CHECK(plan.min_dist == ms.min_dist);
  CHECK(plan.r == ms.r);
  CHECK(plan.norm_step == 0.0);
  CHECK(plan.dims.size() == 2);
  CHECK(plan.final_dim() == plan.dims[1]);

  // Spreadsheet-style re-evaluation of every quantity.
  const double delta = (plan.eps_working / std::sqrt(2.0)) *
                       std::pow(std::sqrt(2.0) / std::numbers::pi, 2);
  CHECK(plan.delta == doctest::Approx(delta).epsilon(1e-14));
  CHECK(delta < 2.0 / (ms.r * ms.r));
  for (int j = 1; j <= 2; ++j) {
    const double expo = 6.0 * (std::pow(2.0 / 3.0, j) - std::pow(2.0 / 3.0, 2));
    const double expect = std::ceil(24.0 * std::pow(2.0, 2.0 * (2 - j)) * std::pow(ms.r, expo) *
                                    std::log(50.0) / (delta * delta));
    CHECK(static_cast<double>(plan.dims[j - 1]) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(plan.dims[0] > plan.dims[1]);

  // N also equals the closed form in terms of the working accuracy.
  const double n_closed = std::ceil(48.0 * std::pow(std::numbers::pi / std::sqrt(2.0), 4) *
                                    std::log(50.0) / (plan.eps_working * plan.eps_working));
  CHECK(static_cast<double>(plan.final_dim()) == doctest::Approx(n_closed).epsilon(1e-12));
}

TEST_CASE("three-level schedule stays consistent") {
  const auto set = gen_close_pairs(20, 16, 0.12, 5);
  const auto ms = measure(set);
  const double eps = 0.9 * ms.min_gap;
  const auto plan = make_plan(set, eps, 1);
  CHECK(plan.levels == 3);
  CHECK(plan.dims.size() == 3);
  CHECK(plan.dims[0] >= plan.dims[1]);
  CHECK(plan.dims[1] >= plan.dims[2]);
}

TEST_CASE("epsilon precondition is checked against measured pairs") {
  const auto set = gen_close_pairs(4, 8, 0.4, 7);
  // min gap is about 0.08 here.
  CHECK_THROWS_AS(make_plan(set, 0.5, 1), PreconditionError);
  try {
    make_plan(set, 0.5, 1);
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("pair (0, 1)") != std::string::npos);
  }
  CHECK_THROWS_AS(make_plan(set, 0.0, 1), PreconditionError);
  CHECK_THROWS_AS(make_plan(set, 1.0, 1), PreconditionError);
}

TEST_CASE("ball mode fills the norm quantizer") {
  const auto set = gen_ball(12, 16, 0.25, 0.3, 17);
  const auto ms = measure(set);
  const double eps = 0.8 * ms.min_gap;
  const auto plan = make_plan(set, eps, 3);
  CHECK(plan.mode == Mode::Ball);
  CHECK(plan.eps_working == eps / 32.0);
  CHECK(plan.norm_step ==
        doctest::Approx(ms.min_sq_norm * ms.min_dist * ms.min_dist * eps / 48.0)
            .epsilon(1e-14));
  CHECK(norm_bits(plan) == static_cast<int>(std::ceil(std::log2(1.0 / plan.norm_step))));
  CHECK(bit_budget(plan) ==
        plan.n * plan.final_dim() + plan.n * static_cast<std::uint64_t>(norm_bits(plan)));
}

TEST_CASE("bit budget arithmetic") {
  CascadePlan plan;
  plan.mode = Mode::Sphere;
  plan.n = 100;
  plan.dims = {4096};
  plan.levels = 1;
  CHECK(bit_budget(plan) == 409600);

  CascadePlan ball;
  ball.mode = Mode::Ball;
  ball.n = 10;
  ball.dims = {64};
  ball.levels = 1;
  ball.norm_step = std::pow(2.0, -10);
  CHECK(norm_bits(ball) == 10);
  CHECK(bit_budget(ball) == 640 + 100);
}

TEST_CASE("dimension schedule is nonincreasing for r >= 2") {
  const std::uint64_t stream = rng::derive_stream(2718, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    const double u0 = rng::uniform_open(stream, 4 * rep);
    const double u1 = rng::uniform_open(stream, 4 * rep + 1);
    const double u2 = rng::uniform_open(stream, 4 * rep + 2);
    const double u3 = rng::uniform_open(stream, 4 * rep + 3);
    const int levels = 1 + static_cast<int>(u0 * 8.0);
    const double r = 2.0 * std::pow(10.0, 3.0 * u1);
    const std::uint64_t n = 2 + static_cast<std::uint64_t>(u2 * 1e6);
    const double delta = (2.0 / (r * r)) * (0.05 + 0.9 * u3);
    const auto dims = dimension_schedule(levels, r, n, delta, 48.0);
    for (std::size_t j = 1; j < dims.size(); ++j) {
      CHECK(dims[j - 1] >= dims[j]);
    }
  }
}

TEST_CASE("chosen level count tames the distance exponent") {
  // (1/m)^(2^(1-L)) < 4 for the planner's L, on a log grid of m.
  for (int i = 0; i <= 400; ++i) {
    const double m = std::pow(10.0, -6.0 + 6.151 * i / 400.0);  // up to ~sqrt(2)
    const int levels = levels_for_min_dist(m);
    CHECK(std::pow(1.0 / m, std::pow(2.0, 1 - levels)) < 4.0);
  }
}

TEST_CASE("plans are byte-for-byte deterministic") {
  const auto set = gen_sphere(20, 16, 0.3, 4242);
  const auto a = make_plan(set, 0.3, 7);
  const auto b = make_plan(set, 0.3, 7);
  CHECK(plan_to_text(a) == plan_to_text(b));
  CHECK(a.dims == b.dims);
}

TEST_CASE("plan_from_measurements agrees with make_plan") {
  const auto set = gen_sphere(30, 32, 0.3, 9);
  const auto ms = measure(set);
  const double eps = 0.25;
  const auto direct = make_plan(set, eps, 5);
  const auto derived = plan_from_measurements(Mode::Sphere, set.n, set.d, ms.min_dist, ms.r,
                                              ms.min_sq_norm, eps, 5);
  CHECK(plan_to_text(direct) == plan_to_text(derived));
  CHECK_THROWS_AS(
      plan_from_measurements(Mode::Sphere, 10, 8, 0.01, 2.0 / std::sqrt(5e-5), 1.0, 0.2, 1),
      PreconditionError);
}
