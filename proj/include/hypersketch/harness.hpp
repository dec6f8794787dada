#pragma once

#include <cstdint>
#include <vector>

#include "hypersketch/planner.hpp"
#include "hypersketch/pointset.hpp"

namespace hypersketch {

// Deterministic instance generators. Each one re-measures its output, so the
// declared constraints hold as seen by the planner, and fails after a
// documented retry budget (max(10000, 200*n) candidate draws) when the
// requested packing is infeasible.

// n uniform unit vectors with pairwise distance >= min_dist_target.
PointSet gen_sphere(std::size_t n, std::size_t d, double min_dist_target, std::uint64_t seed);

// A pair at distance exactly dist_exact (constructed by rotating one point by
// the exact angle), remaining points well separated from everything.
PointSet gen_close_pairs(std::size_t n, std::size_t d, double dist_exact, std::uint64_t seed);

// Norms uniform in [sqrt(min_sq_norm_target), 1], normalized directions
// separated by >= min_dist_target.
PointSet gen_ball(std::size_t n, std::size_t d, double min_sq_norm_target,
                  double min_dist_target, std::uint64_t seed);

// Exact pairwise squared distances, n x n row-major, zero diagonal.
std::vector<double> true_sq_dists(const PointSet& points);

// One-sided 95% Clopper-Pearson lower confidence bound for a binomial
// success probability.
double binomial_lower_bound_95(std::uint64_t successes, std::uint64_t trials);

struct TrialRecord {
  std::uint64_t seed = 0;
  bool all_pairs_ok = false;     // every pair within (1 +- eps) of truth
  double max_rel_error = 0.0;
  // max over pairs of |est - true| / (eps_working * true^(1 - 2^-L));
  // <= 1 means the additive error bound held for every pair.
  double max_additive_ratio = 0.0;
};

struct TrialReport {
  std::uint64_t trials = 0;
  std::vector<TrialRecord> per_trial;  // ordered by seed
  std::uint64_t successes = 0;
  double success_rate = 0.0;       // meaningful only when defined
  bool defined = false;            // false for trials == 0
  double cp_lower_95 = 0.0;        // one-sided binomial lower bound
  double target_rate = 0.0;        // (1 - 2/n)^L
  CascadePlan plan;                // the plan the trials ran with
};

struct TrialOptions {
  PlannerOptions planner;
  // Divides every level dimension (the final one is N) for undersized-sketch
  // ablations; 1 means the planned dimensions.
  std::uint64_t dim_divisor = 1;
  int threads = 0;  // 0 = hardware concurrency
  // Refuse to run a trial whose sketch would cost more than this many row
  // generation + dot product operations.
  double max_ops_per_trial = 2e11;
};

// Plans once from (points, epsilon), then for trial t sketches the whole set
// with master seed seed0 + t, estimates all pairs, and records whether every
// pair landed within (1 +- eps) of the exact squared distance. Planner
// precondition violations surface before any trial runs.
TrialReport run_trials(const PointSet& points, double epsilon, std::uint64_t trials,
                       std::uint64_t seed0, const TrialOptions& options = {});

struct JlTrialReport {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  bool defined = false;
  double cp_lower_95 = 0.0;
  double target_rate = 0.0;  // 1 - 2/n
  double max_rel_error = 0.0;
  double min_dist = 0.0;     // of the original points; sets the grid step
  std::uint64_t k = 0;
  int bits_per_coord = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t clamped_count = 0;
};

// Same trial protocol for the baseline: project with seed0 + t, quantize,
// decode, and require every pair within (1 +- eps) of the exact squared
// distance.
JlTrialReport jl_run_trials(const PointSet& points, double epsilon, std::uint64_t trials,
                            std::uint64_t seed0, int threads = 0);

struct KernelTestResult {
  double expected = 0.0;   // arcsine_kernel(inner)
  double mean = 0.0;       // sample mean over trials
  double std_error = 0.0;  // sample std / sqrt(trials)
  double z = 0.0;
  bool pass = false;       // |z| <= 4
};

// Builds a fixed pair of unit vectors with the prescribed inner product and
// checks that the single-level sketch inner product is an unbiased estimate
// of arcsine_kernel(inner), within a 4 standard error band.
KernelTestResult kernel_unbiasedness_test(double inner, std::size_t d, std::uint64_t dim,
                                          std::uint64_t trials, std::uint64_t seed);

}  // namespace hypersketch
