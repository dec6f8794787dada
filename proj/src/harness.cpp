#include "hypersketch/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hypersketch/bitvec.hpp"
#include "hypersketch/cascade.hpp"
#include "hypersketch/errors.hpp"
#include "hypersketch/iterates.hpp"
#include "hypersketch/jl_baseline.hpp"
#include "hypersketch/parallel.hpp"
#include "hypersketch/recovery.hpp"
#include "hypersketch/rng.hpp"

namespace hypersketch {

namespace {

constexpr std::uint64_t kGenDomain = 0x67656e70747321ull;

std::size_t retry_budget(std::size_t n) { return std::max<std::size_t>(10000, 200 * n); }

std::string format_provenance(const char* gen, std::size_t n, std::size_t d, double a, double b,
                              std::uint64_t seed) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s n=%zu d=%zu a=%.17g b=%.17g seed=%llu", gen, n, d, a, b,
                static_cast<unsigned long long>(seed));
  return buf;
}

// Uniform unit vector; attempt index keeps draws distinct across retries.
std::vector<double> random_unit(std::uint64_t stream, std::uint64_t attempt, std::size_t d) {
  std::vector<double> x(d);
  rng::gaussian_fill(rng::derive_stream(stream, attempt), 0, x);
  const double nrm = norm(x);
  if (!(nrm > 0.0)) throw std::runtime_error("random_unit: degenerate draw");
  for (double& v : x) v /= nrm;
  return x;
}

double min_dist_to(const std::vector<std::vector<double>>& accepted,
                   const std::vector<double>& candidate) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : accepted) {
    best = std::min(best, std::sqrt(sq_dist(p, candidate)));
  }
  return best;
}

double max_abs_inner_to(const std::vector<std::vector<double>>& accepted,
                        const std::vector<double>& candidate) {
  double worst = 0.0;
  for (const auto& p : accepted) {
    worst = std::max(worst, std::abs(dot(p, candidate)));
  }
  return worst;
}

PointSet assemble(Mode mode, std::size_t d, const std::vector<std::vector<double>>& pts,
                  std::string provenance) {
  PointSet set;
  set.mode = mode;
  set.n = pts.size();
  set.d = d;
  set.provenance = std::move(provenance);
  set.data.reserve(set.n * d);
  for (const auto& p : pts) set.data.insert(set.data.end(), p.begin(), p.end());
  validate_point_set(set);
  return set;
}

}  // namespace

PointSet gen_sphere(std::size_t n, std::size_t d, double min_dist_target, std::uint64_t seed) {
  if (n < 2 || d < 2) throw std::invalid_argument("gen_sphere: need n >= 2 and d >= 2");
  if (!(min_dist_target > 0.0) || !(min_dist_target < 2.0)) {
    throw std::invalid_argument("gen_sphere: min_dist_target must be in (0, 2)");
  }
  const std::uint64_t stream = rng::derive_stream(rng::derive_stream(seed, kGenDomain), 1);
  std::vector<std::vector<double>> accepted;
  accepted.reserve(n);
  const std::size_t budget = retry_budget(n);
  for (std::size_t attempt = 0; attempt < budget && accepted.size() < n; ++attempt) {
    auto cand = random_unit(stream, attempt, d);
    if (min_dist_to(accepted, cand) >= min_dist_target) accepted.push_back(std::move(cand));
  }
  if (accepted.size() < n) {
    throw std::runtime_error("gen_sphere: packing infeasible, accepted " +
                             std::to_string(accepted.size()) + " of " + std::to_string(n) +
                             " points within " + std::to_string(budget) + " attempts");
  }
  return assemble(Mode::Sphere, d, accepted,
                  format_provenance("gen_sphere", n, d, min_dist_target, 0.0, seed));
}

PointSet gen_close_pairs(std::size_t n, std::size_t d, double dist_exact, std::uint64_t seed) {
  if (n < 2 || d < 2) throw std::invalid_argument("gen_close_pairs: need n >= 2 and d >= 2");
  if (!(dist_exact > 0.0) || !(dist_exact < 0.5)) {
    throw std::invalid_argument("gen_close_pairs: dist_exact must be in (0, 0.5)");
  }
  const std::uint64_t stream = rng::derive_stream(rng::derive_stream(seed, kGenDomain), 2);

  auto x0 = random_unit(stream, 0, d);
  // Orthonormal companion direction.
  std::vector<double> u;
  for (std::uint64_t attempt = 1;; ++attempt) {
    u = random_unit(stream, attempt, d);
    const double proj = dot(u, x0);
    for (std::size_t k = 0; k < d; ++k) u[k] -= proj * x0[k];
    const double nrm = norm(u);
    if (nrm > 1e-6) {
      for (double& v : u) v /= nrm;
      break;
    }
  }
  // Rotating x0 by the angle with cos = 1 - dist^2/2 puts the pair at
  // squared distance exactly dist^2.
  const double c = 1.0 - dist_exact * dist_exact / 2.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  std::vector<double> x1(d);
  for (std::size_t k = 0; k < d; ++k) x1[k] = c * x0[k] + s * u[k];

  std::vector<std::vector<double>> accepted{x0, x1};
  constexpr double kFarDist = 0.9;
  constexpr double kMaxAbsInner = 0.6;
  const std::size_t budget = retry_budget(n);
  for (std::size_t attempt = 1000; attempt < 1000 + budget && accepted.size() < n; ++attempt) {
    auto cand = random_unit(stream, attempt, d);
    if (min_dist_to(accepted, cand) >= kFarDist &&
        max_abs_inner_to(accepted, cand) <= kMaxAbsInner) {
      accepted.push_back(std::move(cand));
    }
  }
  if (accepted.size() < n) {
    throw std::runtime_error("gen_close_pairs: packing infeasible for n = " + std::to_string(n) +
                             " in dimension " + std::to_string(d));
  }
  return assemble(Mode::Sphere, d, accepted,
                  format_provenance("gen_close_pairs", n, d, dist_exact, 0.0, seed));
}

PointSet gen_ball(std::size_t n, std::size_t d, double min_sq_norm_target,
                  double min_dist_target, std::uint64_t seed) {
  if (!(min_sq_norm_target > 0.0) || min_sq_norm_target > 1.0) {
    throw std::invalid_argument("gen_ball: min_sq_norm_target must be in (0, 1]");
  }
  PointSet directions = gen_sphere(n, d, min_dist_target, seed);
  const std::uint64_t stream = rng::derive_stream(rng::derive_stream(seed, kGenDomain), 3);
  const double lo = std::sqrt(min_sq_norm_target);
  PointSet set;
  set.mode = Mode::Ball;
  set.n = n;
  set.d = d;
  set.data = std::move(directions.data);
  set.provenance =
      format_provenance("gen_ball", n, d, min_sq_norm_target, min_dist_target, seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double nrm = lo + (1.0 - lo) * rng::uniform_open(stream, i);
    for (std::size_t k = 0; k < d; ++k) set.data[i * d + k] *= nrm;
  }
  validate_point_set(set);
  return set;
}

std::vector<double> true_sq_dists(const PointSet& points) {
  validate_point_set(points);
  const std::size_t n = points.n;
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = sq_dist(points.point(i), points.point(j));
      out[i * n + j] = v;
      out[j * n + i] = v;
    }
  }
  return out;
}

double binomial_lower_bound_95(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("binomial_lower_bound_95: no trials");
  if (successes > trials) throw std::invalid_argument("binomial_lower_bound_95: x > n");
  if (successes == 0) return 0.0;
  constexpr double kAlpha = 0.05;
  const double n = static_cast<double>(trials);
  const double x = static_cast<double>(successes);

  // P(X >= x | p), computed stably in log space.
  auto upper_tail = [&](double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double tail = 0.0;
    for (double i = x; i <= n; ++i) {
      const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                              std::lgamma(n - i + 1.0) + i * std::log(p) +
                              (n - i) * std::log1p(-p);
      tail += std::exp(log_term);
    }
    return std::min(tail, 1.0);
  };

  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (upper_tail(mid) < kAlpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TrialReport run_trials(const PointSet& points, double epsilon, std::uint64_t trials,
                       std::uint64_t seed0, const TrialOptions& options) {
  CascadePlan base = make_plan(points, epsilon, seed0, options.planner);
  if (options.dim_divisor > 1) {
    for (auto& dim : base.dims) dim = std::max<std::uint64_t>(1, dim / options.dim_divisor);
  }
  const double ops = estimated_sketch_ops(base);
  if (!(ops <= options.max_ops_per_trial)) {
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "run_trials: one trial would cost ~%.3g ops (budget %.3g); "
                  "levels=%d N=%.3g first-level dim=%.3g",
                  ops, options.max_ops_per_trial, base.levels,
                  static_cast<double>(base.final_dim()), static_cast<double>(base.dims[0]));
    throw InfeasibleError(buf, ops, options.max_ops_per_trial);
  }

  TrialReport report;
  report.trials = trials;
  report.plan = base;
  report.target_rate =
      std::pow(1.0 - 2.0 / static_cast<double>(points.n), static_cast<double>(base.levels));
  if (trials == 0) {
    report.defined = false;
    return report;
  }

  const std::vector<double> truth = true_sq_dists(points);
  const double additive_exponent = 1.0 - std::pow(2.0, -base.levels);
  report.per_trial.resize(trials);

  int total_threads = options.threads > 0 ? options.threads : default_threads();
  // Keep concurrent bundles within a fixed memory envelope.
  const double bundle_bytes =
      static_cast<double>(points.n) * (static_cast<double>(base.final_dim()) / 8.0 + 64.0);
  int trial_threads = static_cast<int>(
      std::min<double>(total_threads, std::max(1.0, 1.5e9 / std::max(1.0, bundle_bytes))));
  trial_threads = std::max(1, std::min<int>(trial_threads, static_cast<int>(trials)));
  const int inner_threads = std::max(1, total_threads / trial_threads);

  parallel_for_aligned(0, trials, 1, trial_threads, [&](std::uint64_t t0, std::uint64_t t1) {
    for (std::uint64_t t = t0; t < t1; ++t) {
      CascadePlan plan = base;
      plan.master_seed = seed0 + t;
      const SketchBundle bundle = sketch_set(points, plan, inner_threads);
      const auto estimates = estimate_all(bundle);
      TrialRecord rec;
      rec.seed = plan.master_seed;
      rec.all_pairs_ok = true;
      for (const auto& pe : estimates) {
        const double tru = truth[pe.i * points.n + pe.j];
        const double abs_err = std::abs(pe.est_sq_dist - tru);
        const double rel = abs_err / tru;
        rec.max_rel_error = std::max(rec.max_rel_error, rel);
        if (rel > epsilon) rec.all_pairs_ok = false;
        const double additive_bound = base.eps_working * std::pow(tru, additive_exponent);
        rec.max_additive_ratio = std::max(rec.max_additive_ratio, abs_err / additive_bound);
      }
      report.per_trial[t] = rec;
    }
  });

  for (const auto& rec : report.per_trial) {
    if (rec.all_pairs_ok) ++report.successes;
  }
  report.defined = true;
  report.success_rate = static_cast<double>(report.successes) / static_cast<double>(trials);
  report.cp_lower_95 = binomial_lower_bound_95(report.successes, trials);
  return report;
}

JlTrialReport jl_run_trials(const PointSet& points, double epsilon, std::uint64_t trials,
                            std::uint64_t seed0, int threads) {
  validate_point_set(points);
  if (points.n < 2) throw std::invalid_argument("jl_run_trials: need at least two points");
  const std::vector<double> truth = true_sq_dists(points);
  double min_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.n; ++i) {
    for (std::size_t j = i + 1; j < points.n; ++j) {
      min_sq = std::min(min_sq, truth[i * points.n + j]);
    }
  }
  if (!(min_sq > 0.0)) throw PreconditionError("jl_run_trials: coincident points");

  JlTrialReport report;
  report.trials = trials;
  report.min_dist = std::sqrt(min_sq);
  report.k = jl_dimension(points.n, epsilon);
  report.bits_per_coord = jl_bits_per_coordinate(report.k, report.min_dist, epsilon);
  report.total_bits =
      points.n * report.k * static_cast<std::uint64_t>(report.bits_per_coord);
  report.target_rate = 1.0 - 2.0 / static_cast<double>(points.n);
  if (trials == 0) return report;

  std::vector<std::uint8_t> ok(trials, 0);
  std::vector<double> max_rel(trials, 0.0);
  std::vector<std::uint64_t> clamped(trials, 0);
  const int use_threads = threads > 0 ? threads : default_threads();
  parallel_for_aligned(0, trials, 1, use_threads, [&](std::uint64_t t0, std::uint64_t t1) {
    for (std::uint64_t t = t0; t < t1; ++t) {
      const auto projected = jl_project(points, epsilon, seed0 + t);
      const auto sketch =
          jl_quantize(projected, points.n, report.k, report.min_dist, epsilon);
      clamped[t] = sketch.clamped_count;
      bool all_ok = true;
      double worst = 0.0;
      for (std::size_t i = 0; i < points.n; ++i) {
        for (std::size_t j = i + 1; j < points.n; ++j) {
          const double tru = truth[i * points.n + j];
          const double rel = std::abs(jl_estimate_sq_dist(sketch, i, j) - tru) / tru;
          worst = std::max(worst, rel);
          if (rel > epsilon) all_ok = false;
        }
      }
      ok[t] = all_ok ? 1 : 0;
      max_rel[t] = worst;
    }
  });
  for (std::uint64_t t = 0; t < trials; ++t) {
    report.successes += ok[t];
    report.max_rel_error = std::max(report.max_rel_error, max_rel[t]);
    report.clamped_count += clamped[t];
  }
  report.defined = true;
  report.success_rate = static_cast<double>(report.successes) / static_cast<double>(trials);
  report.cp_lower_95 = binomial_lower_bound_95(report.successes, trials);
  return report;
}

KernelTestResult kernel_unbiasedness_test(double inner, std::size_t d, std::uint64_t dim,
                                          std::uint64_t trials, std::uint64_t seed) {
  if (!(std::abs(inner) < 1.0)) {
    throw std::invalid_argument("kernel_unbiasedness_test: |inner| must be < 1");
  }
  if (d < 2 || trials < 2) {
    throw std::invalid_argument("kernel_unbiasedness_test: need d >= 2 and trials >= 2");
  }
  std::vector<double> x(d, 0.0), y(d, 0.0);
  x[0] = 1.0;
  y[0] = inner;
  y[1] = std::sqrt(1.0 - inner * inner);

  std::vector<double> samples(trials, 0.0);
  parallel_for_aligned(0, trials, 1, default_threads(), [&](std::uint64_t t0, std::uint64_t t1) {
    for (std::uint64_t t = t0; t < t1; ++t) {
      const auto layer = make_adhoc_layer(seed + t, 1, d, dim);
      const auto sketches = sign_feature_map_batch(
          std::vector<std::span<const double>>{x, y}, layer, 1);
      samples[t] = inner_product(sketches[0], sketches[1]);
    }
  });

  KernelTestResult res;
  res.expected = arcsine_kernel(inner);
  double sum = 0.0;
  for (double v : samples) sum += v;
  res.mean = sum / static_cast<double>(trials);
  double sq = 0.0;
  for (double v : samples) sq += (v - res.mean) * (v - res.mean);
  const double sample_var = sq / static_cast<double>(trials - 1);
  res.std_error = std::sqrt(sample_var / static_cast<double>(trials));
  res.z = (res.mean - res.expected) / res.std_error;
  res.pass = std::abs(res.z) <= 4.0;
  return res;
}

}  // namespace hypersketch
