#pragma once

#include <span>
#include <string>
#include <vector>

namespace hypersketch {

// The scalar maps underlying the cascade and its decoder, together with their
// level-wise compositions and derivatives.
//
//   arcsine_kernel(t) = (2/pi) * asin(t)   expected sign agreement of two
//                                          Gaussian-projected vectors with
//                                          inner product t
//   sine_map(t)       = sin(pi * t / 2)    its exact inverse on [-1, 1]
//
// Level-k compositions are computed by literal k-step loops in double
// precision. Inputs within 1e-12 outside [-1, 1] are clamped to the boundary
// (popcount-normalized inner products can land exactly on +-1 but never
// beyond; clamping absorbs composed-level rounding). Anything further out
// throws std::domain_error.

double arcsine_kernel(double t);
double sine_map(double t);

double arcsine_kernel_iter(double t, int levels);
double sine_map_iter(double t, int levels);

// d/dt of the level-k sine map, by the chain rule. At t = +-1 returns the
// one-sided analytic limit, which is 0.
double sine_map_iter_derivative(double t, int levels);

// One row of the inequality report produced by check_iterate_inequalities.
struct InequalityViolation {
  char id;  // 'a'..'f'
  double t;
  int levels;
  double lhs;
  double rhs;
  std::string describe() const;
};

// Checks, for every t in `grid` (subset of [0,1]) and every level <= max_levels:
//
//   (a)  D[sine_map_iter](arcsine_kernel_iter(t)) <= pi^L / 2^((L+1)/2) * (2-2t)^(1-2^-L)
//   (b)  0 <= D[sine_map_iter](t) <= (pi/2)^L
//   (c)  |arcsine_kernel_iter(t)| <= |t|
//   (d)  1 - |arcsine_kernel_iter(t)| >= (1-|t|)^((2/3)^L)
//   (e)  1 - arcsine_kernel(t) <= sqrt(1-t)
//   (f)  1 - arcsine_kernel_iter(t) <= (2-2t)^(2^-L)
//
// Returns the list of violations beyond an absolute tolerance of 1e-12;
// empty on success.
std::vector<InequalityViolation> check_iterate_inequalities(std::span<const double> grid,
                                                            int max_levels);

}  // namespace hypersketch
