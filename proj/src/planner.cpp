#include "hypersketch/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hypersketch/errors.hpp"

namespace hypersketch {

namespace {

constexpr double kDegenerateGap = 1e-12;

std::vector<double> normalized_copy(const PointSet& points) {
  std::vector<double> out(points.data.size());
  for (std::size_t i = 0; i < points.n; ++i) {
    const auto x = points.point(i);
    const double nrm = norm(x);
    for (std::size_t k = 0; k < points.d; ++k) out[i * points.d + k] = x[k] / nrm;
  }
  return out;
}

std::uint64_t saturating_ceil(long double v, bool* saturated) {
  constexpr long double kMax = 1.8e19L;  // below 2^64
  if (!(v >= 0.0L)) throw std::logic_error("dimension schedule produced a negative value");
  if (v > kMax) {
    if (saturated) *saturated = true;
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace

Measurements measure(const PointSet& points) {
  validate_point_set(points);
  if (points.n < 2) throw std::invalid_argument("measure: need at least two points");

  const std::size_t n = points.n;
  const std::size_t d = points.d;
  const std::vector<double> unit = normalized_copy(points);
  auto unit_point = [&](std::size_t i) {
    return std::span<const double>{unit.data() + i * d, d};
  };

  Measurements ms;
  ms.min_dist = std::numeric_limits<double>::infinity();
  ms.min_gap = std::numeric_limits<double>::infinity();
  ms.min_sq_norm = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < n; ++i) {
    const double nrm = norm(points.point(i));
    ms.min_sq_norm = std::min(ms.min_sq_norm, nrm * nrm);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = std::sqrt(sq_dist(unit_point(i), unit_point(j)));
      const double ip = std::clamp(dot(unit_point(i), unit_point(j)), -1.0, 1.0);
      const double gap = 1.0 - std::abs(ip);
      if (dist < ms.min_dist) {
        ms.min_dist = dist;
        ms.min_dist_i = i;
        ms.min_dist_j = j;
      }
      if (gap < ms.min_gap) {
        ms.min_gap = gap;
        ms.min_gap_i = i;
        ms.min_gap_j = j;
      }
    }
  }

  if (points.mode == Mode::Sphere) ms.min_sq_norm = 1.0;

  if (ms.min_gap <= kDegenerateGap) {
    throw DegenerateInputError(
        "degenerate input: normalized points " + std::to_string(ms.min_gap_i) + " and " +
            std::to_string(ms.min_gap_j) +
            " are coincident or antipodal (1 - |<x,y>| = " + std::to_string(ms.min_gap) + ")",
        ms.min_gap_i, ms.min_gap_j);
  }
  ms.r = 2.0 / std::sqrt(ms.min_gap);
  return ms;
}

int levels_for_min_dist(double min_dist) {
  if (!(min_dist > 0.0) || min_dist >= 2.0) {
    throw std::invalid_argument("levels_for_min_dist: min_dist must be in (0, 2)");
  }
  const double ll = std::log2(std::log2(4.0 / min_dist));
  const int levels = static_cast<int>(std::ceil(ll));
  return std::max(1, levels);
}

double working_epsilon(Mode mode, double epsilon) {
  return mode == Mode::Sphere ? epsilon / 4.0 : epsilon / 32.0;
}

double level_error_bound(const CascadePlan& plan, int level) {
  if (level < 1 || level > plan.levels) throw std::invalid_argument("level out of range");
  const double expo =
      3.0 * (std::pow(2.0 / 3.0, level) - std::pow(2.0 / 3.0, plan.levels));
  return plan.delta / (std::pow(2.0, plan.levels - level) * std::pow(plan.r, expo));
}

std::vector<std::uint64_t> dimension_schedule(int levels, double r, std::uint64_t n,
                                              double delta, double n_constant,
                                              bool* saturated) {
  if (levels < 1) throw std::invalid_argument("dimension_schedule: levels must be >= 1");
  if (!(r >= 2.0)) throw std::invalid_argument("dimension_schedule: r must be >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("dimension_schedule: delta must be positive");
  const long double log_n = std::log(static_cast<long double>(n));
  const long double base = (static_cast<long double>(n_constant) / 2.0L) * log_n /
                           (static_cast<long double>(delta) * delta);
  std::vector<std::uint64_t> dims(levels);
  for (int j = 1; j <= levels; ++j) {
    const long double expo =
        6.0L * (std::pow(2.0L / 3.0L, static_cast<long double>(j)) -
                std::pow(2.0L / 3.0L, static_cast<long double>(levels)));
    const long double v = base * std::pow(2.0L, 2.0L * (levels - j)) *
                          std::pow(static_cast<long double>(r), expo);
    dims[j - 1] = saturating_ceil(v, saturated);
  }
  return dims;
}

namespace {

CascadePlan derive_plan(Mode mode, std::uint64_t n, std::uint64_t d, double min_dist, double r,
                        double min_sq_norm, double epsilon, std::uint64_t master_seed,
                        const PlannerOptions& options) {
  CascadePlan plan;
  plan.mode = mode;
  plan.n = n;
  plan.d = d;
  plan.epsilon = epsilon;
  plan.min_dist = min_dist;
  plan.r = r;
  plan.min_sq_norm = min_sq_norm;
  plan.master_seed = master_seed;
  plan.n_constant = options.n_constant;

  plan.levels = levels_for_min_dist(min_dist);
  plan.eps_working = working_epsilon(mode, epsilon);
  plan.delta = (plan.eps_working / std::numbers::sqrt2) *
               std::pow(std::numbers::sqrt2 / std::numbers::pi, plan.levels);
  if (!(plan.delta < 2.0 / (r * r))) {
    // Cannot happen when epsilon < 4/r^2 holds; kept as a hard check.
    throw std::logic_error("plan: derived per-level tolerance is not below 2/r^2");
  }
  plan.dims = dimension_schedule(plan.levels, r, n, plan.delta, options.n_constant,
                                 &plan.dims_saturated);
  if (mode == Mode::Ball) {
    plan.norm_step = min_sq_norm * min_dist * min_dist * epsilon / 48.0;
  }
  return plan;
}

void check_epsilon_range(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw PreconditionError("epsilon must be in (0, 1), got " + std::to_string(epsilon));
  }
}

}  // namespace

CascadePlan make_plan(const PointSet& points, double epsilon, std::uint64_t master_seed,
                      const PlannerOptions& options) {
  check_epsilon_range(epsilon);
  if (options.n_constant <= 0.0) throw std::invalid_argument("n_constant must be positive");
  const Measurements ms = measure(points);
  if (!(epsilon < ms.min_gap)) {
    throw PreconditionError(
        "epsilon = " + std::to_string(epsilon) +
        " is not below min over pairs of 1 - |<x,y>| = " + std::to_string(ms.min_gap) +
        ", attained by pair (" + std::to_string(ms.min_gap_i) + ", " +
        std::to_string(ms.min_gap_j) + ")");
  }
  return derive_plan(points.mode, points.n, points.d, ms.min_dist, ms.r, ms.min_sq_norm,
                     epsilon, master_seed, options);
}

CascadePlan plan_from_measurements(Mode mode, std::uint64_t n, std::uint64_t d, double min_dist,
                                   double r, double min_sq_norm, double epsilon,
                                   std::uint64_t master_seed, const PlannerOptions& options) {
  check_epsilon_range(epsilon);
  if (n < 2) throw std::invalid_argument("plan_from_measurements: n must be >= 2");
  if (!(r >= 2.0)) throw std::invalid_argument("plan_from_measurements: r must be >= 2");
  if (!(min_sq_norm > 0.0) || min_sq_norm > 1.0) {
    throw std::invalid_argument("plan_from_measurements: min_sq_norm must be in (0, 1]");
  }
  if (!(epsilon < 4.0 / (r * r))) {
    throw PreconditionError("epsilon = " + std::to_string(epsilon) +
                            " is not below the implied pair gap 4/r^2 = " +
                            std::to_string(4.0 / (r * r)));
  }
  return derive_plan(mode, n, d, min_dist, r, min_sq_norm, epsilon, master_seed, options);
}

int norm_bits(const CascadePlan& plan) {
  if (plan.mode == Mode::Sphere) return 0;
  return static_cast<int>(std::ceil(std::log2(1.0 / plan.norm_step)));
}

std::uint64_t bit_budget(const CascadePlan& plan) {
  const unsigned __int128 payload =
      static_cast<unsigned __int128>(plan.n) * plan.final_dim();
  const unsigned __int128 norms =
      static_cast<unsigned __int128>(plan.n) * static_cast<std::uint64_t>(norm_bits(plan));
  const unsigned __int128 total = payload + norms;
  constexpr unsigned __int128 kMax = std::numeric_limits<std::uint64_t>::max();
  return total > kMax ? std::numeric_limits<std::uint64_t>::max()
                      : static_cast<std::uint64_t>(total);
}

}  // namespace hypersketch
