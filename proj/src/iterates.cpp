#include "hypersketch/iterates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace hypersketch {

namespace {

constexpr double kDomainSlack = 1e-12;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

double clamp_unit(double t) {
  if (std::isnan(t) || std::abs(t) > 1.0 + kDomainSlack) {
    throw std::domain_error("iterates: argument outside [-1, 1]: " + std::to_string(t));
  }
  return std::clamp(t, -1.0, 1.0);
}

void check_levels(int levels) {
  if (levels < 1) throw std::invalid_argument("iterates: level count must be >= 1");
}

// Core maps on already-clamped arguments. The +-1 fixed points are handled
// exactly so that compositions keep them; (2/pi)*asin(1) rounds below 1 in
// doubles and would otherwise drift through the levels.
double arcsine_core(double t) {
  if (t == 1.0) return 1.0;
  if (t == -1.0) return -1.0;
  return kTwoOverPi * std::asin(t);
}

double sine_core(double t) { return std::sin(t * kHalfPi); }

double sine_derivative_core(double t) {
  if (t == 1.0 || t == -1.0) return 0.0;
  return kHalfPi * std::cos(t * kHalfPi);
}

}  // namespace

double arcsine_kernel(double t) { return arcsine_core(clamp_unit(t)); }

double sine_map(double t) { return sine_core(clamp_unit(t)); }

double arcsine_kernel_iter(double t, int levels) {
  check_levels(levels);
  double v = clamp_unit(t);
  for (int k = 0; k < levels; ++k) v = arcsine_core(v);
  return v;
}

double sine_map_iter(double t, int levels) {
  check_levels(levels);
  double v = clamp_unit(t);
  for (int k = 0; k < levels; ++k) v = sine_core(v);
  return v;
}

double sine_map_iter_derivative(double t, int levels) {
  check_levels(levels);
  double v = clamp_unit(t);
  double deriv = 1.0;
  for (int k = 0; k < levels; ++k) {
    deriv *= sine_derivative_core(v);
    v = sine_core(v);
  }
  return deriv;
}

std::string InequalityViolation::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "(%c) t=%.17g levels=%d lhs=%.17g rhs=%.17g", id, t, levels,
                lhs, rhs);
  return buf;
}

std::vector<InequalityViolation> check_iterate_inequalities(std::span<const double> grid,
                                                            int max_levels) {
  check_levels(max_levels);
  constexpr double kTol = 1e-12;
  std::vector<InequalityViolation> violations;
  auto report = [&](char id, double t, int lv, double lhs, double rhs) {
    violations.push_back({id, t, lv, lhs, rhs});
  };

  for (double t : grid) {
    if (t < 0.0 || t > 1.0) {
      throw std::invalid_argument("check_iterate_inequalities: grid value outside [0, 1]");
    }
    // (e) is level-independent.
    {
      const double lhs = 1.0 - arcsine_kernel(t);
      const double rhs = std::sqrt(1.0 - t);
      if (lhs > rhs + kTol) report('e', t, 1, lhs, rhs);
    }
    for (int lv = 1; lv <= max_levels; ++lv) {
      const double fl = arcsine_kernel_iter(t, lv);
      const double pow2neg = std::pow(2.0, -lv);

      {
        const double lhs = sine_map_iter_derivative(fl, lv);
        const double rhs = std::pow(std::numbers::pi, lv) / std::pow(2.0, (lv + 1) / 2.0) *
                           std::pow(2.0 - 2.0 * t, 1.0 - pow2neg);
        if (lhs > rhs + kTol) report('a', t, lv, lhs, rhs);
      }
      {
        const double d = sine_map_iter_derivative(t, lv);
        const double cap = std::pow(kHalfPi, lv);
        if (d < -kTol) report('b', t, lv, d, 0.0);
        if (d > cap + kTol) report('b', t, lv, d, cap);
      }
      if (std::abs(fl) > t + kTol) report('c', t, lv, std::abs(fl), t);
      {
        const double lhs = 1.0 - std::abs(fl);
        const double rhs = std::pow(1.0 - t, std::pow(2.0 / 3.0, lv));
        if (lhs < rhs - kTol) report('d', t, lv, lhs, rhs);
      }
      {
        const double lhs = 1.0 - fl;
        const double rhs = std::pow(2.0 - 2.0 * t, pow2neg);
        if (lhs > rhs + kTol) report('f', t, lv, lhs, rhs);
      }
    }
  }
  return violations;
}

}  // namespace hypersketch
