#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hypersketch/errors.hpp"
#include "hypersketch/harness.hpp"
#include "hypersketch/planner.hpp"

using namespace hypersketch;

TEST_CASE("gen_sphere: feasible instances satisfy the declared separation") {
  const auto tiny = gen_sphere(2, 2, 0.1, 10);
  CHECK(tiny.n == 2);
  CHECK(measure(tiny).min_dist >= 0.1);

  const auto set = gen_sphere(40, 24, 0.3, 2025);
  CHECK(measure(set).min_dist >= 0.3);
  // Determinism per seed.
  CHECK(gen_sphere(40, 24, 0.3, 2025).data == set.data);
  CHECK(gen_sphere(40, 24, 0.3, 2026).data != set.data);
}

TEST_CASE("gen_sphere: infeasible packings exhaust the retry budget") {
  CHECK_THROWS_AS(gen_sphere(1000, 2, 1.9, 1), std::runtime_error);
  CHECK_THROWS_AS(gen_sphere(2, 2, 2.5, 1), std::invalid_argument);
}

TEST_CASE("gen_close_pairs: the planted pair sits at the exact distance") {
  for (double target : {0.01, 0.05, 0.3}) {
    const auto set = gen_close_pairs(8, 16, target, 7);
    const auto ms = measure(set);
    CHECK(std::abs(ms.min_dist - target) <= 1e-12 * std::max(1.0, 1.0 / target));
    CHECK(ms.min_dist_i == 0);
    CHECK(ms.min_dist_j == 1);
  }
  // The planner formula sees four levels at distance 0.01.
  const auto set = gen_close_pairs(6, 16, 0.01, 3);
  CHECK(levels_for_min_dist(measure(set).min_dist) == 4);
}

TEST_CASE("gen_ball: norms and separation") {
  const auto set = gen_ball(30, 16, 0.25, 0.3, 11);
  CHECK(set.mode == Mode::Ball);
  const auto ms = measure(set);
  CHECK(ms.min_sq_norm >= 0.25);
  CHECK(ms.min_dist >= 0.3);  // separation of normalized directions
  // Planner accepts it with a small enough accuracy target.
  const auto plan = make_plan(set, 0.1 * ms.min_gap, 1);
  CHECK(plan.mode == Mode::Ball);

  // Degenerate ball: unit norms everywhere.
  const auto sphereish = gen_ball(10, 8, 1.0, 0.3, 5);
  for (std::size_t i = 0; i < sphereish.n; ++i) {
    CHECK(norm(sphereish.point(i)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("true squared distances") {
  PointSet set;
  set.mode = Mode::Sphere;
  set.n = 3;
  set.d = 2;
  set.data = {1, 0, 0, 1, -1, 0};
  const auto truth = true_sq_dists(set);
  CHECK(truth[0 * 3 + 1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(truth[0 * 3 + 2] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(truth[1 * 3 + 2] == doctest::Approx(2.0).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) CHECK(truth[i * 3 + i] == 0.0);
  CHECK(truth[2 * 3 + 0] == truth[0 * 3 + 2]);

  const auto rnd = gen_ball(10, 6, 0.3, 0.2, 8);
  const auto t2 = true_sq_dists(rnd);
  for (std::size_t i = 0; i < rnd.n; ++i) {
    for (std::size_t j = 0; j < rnd.n; ++j) {
      const double viaip = dot(rnd.point(i), rnd.point(i)) + dot(rnd.point(j), rnd.point(j)) -
                           2.0 * dot(rnd.point(i), rnd.point(j));
      CHECK(std::abs(t2[i * rnd.n + j] - viaip) <= 1e-12);
    }
  }
}

TEST_CASE("binomial lower bound") {
  // Closed form at full success: alpha^(1/n).
  CHECK(binomial_lower_bound_95(50, 50) ==
        doctest::Approx(std::pow(0.05, 1.0 / 50.0)).epsilon(1e-9));
  CHECK(binomial_lower_bound_95(0, 20) == 0.0);

  // Self-consistency: at the returned bound, P(X >= x) = alpha.
  auto upper_tail = [](double p, int n, int x) {
    double tail = 0.0;
    for (int i = x; i <= n; ++i) {
      tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                       i * std::log(p) + (n - i) * std::log1p(-p));
    }
    return tail;
  };
  for (int x : {1, 10, 25, 49}) {
    const double lb = binomial_lower_bound_95(x, 50);
    CHECK(upper_tail(lb, 50, x) == doctest::Approx(0.05).epsilon(1e-6));
  }
  CHECK(binomial_lower_bound_95(49, 50) < binomial_lower_bound_95(50, 50));
  CHECK_THROWS_AS(binomial_lower_bound_95(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(binomial_lower_bound_95(5, 4), std::invalid_argument);
}

TEST_CASE("run_trials: zero trials are flagged, target rate from the plan") {
  const auto set = gen_sphere(12, 24, 0.3, 517);
  const auto report = run_trials(set, 0.4, 0, 1000);
  CHECK_FALSE(report.defined);
  CHECK(report.trials == 0);
  CHECK(report.target_rate ==
        doctest::Approx(std::pow(1.0 - 2.0 / 12.0, report.plan.levels)).epsilon(1e-15));
}

TEST_CASE("run_trials: small end-to-end run succeeds and is reproducible") {
  const auto set = gen_sphere(8, 24, 0.3, 99);
  TrialOptions opts;
  opts.threads = 2;
  const auto report = run_trials(set, 0.45, 6, 5000, opts);
  REQUIRE(report.defined);
  CHECK(report.trials == 6);
  CHECK(report.per_trial.size() == 6);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(report.per_trial[t].seed == 5000 + t);
  }
  CHECK(report.successes == 6);  // enormous margin at the planned dimension
  CHECK(report.cp_lower_95 > 0.55);
  for (const auto& rec : report.per_trial) {
    CHECK(rec.max_rel_error < 0.45);
    CHECK(rec.max_additive_ratio <= 1.0);
  }

  TrialOptions serial = opts;
  serial.threads = 1;
  const auto again = run_trials(set, 0.45, 6, 5000, serial);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(again.per_trial[t].max_rel_error == report.per_trial[t].max_rel_error);
  }
}

TEST_CASE("run_trials: precondition violations surface before any trial") {
  const auto set = gen_close_pairs(5, 8, 0.3, 2);
  CHECK_THROWS_AS(run_trials(set, 0.5, 3, 1), PreconditionError);
}

TEST_CASE("run_trials: oversized plans are refused with a cost estimate") {
  const auto set = gen_close_pairs(6, 16, 0.01, 3);
  const double eps = 0.9 * measure(set).min_gap;
  try {
    run_trials(set, eps, 1, 1);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.estimated_ops > e.budget_ops);
  }
}

TEST_CASE("kernel unbiasedness at small scale") {
  const auto zero = kernel_unbiasedness_test(0.0, 16, 4000, 40, 2020);
  CHECK(zero.expected == 0.0);
  CHECK(zero.pass);
  const auto half = kernel_unbiasedness_test(0.5, 16, 4000, 40, 2021);
  CHECK(half.expected == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(half.pass);
  CHECK_THROWS_AS(kernel_unbiasedness_test(1.0, 16, 100, 10, 1), std::invalid_argument);
}
