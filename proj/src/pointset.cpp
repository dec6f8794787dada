#include "hypersketch/pointset.hpp"

#include <cmath>
#include <stdexcept>

namespace hypersketch {

const char* mode_name(Mode mode) { return mode == Mode::Sphere ? "sphere" : "ball"; }

Mode mode_from_name(const std::string& name) {
  if (name == "sphere") return Mode::Sphere;
  if (name == "ball") return Mode::Ball;
  throw std::invalid_argument("unknown mode: " + name + " (expected sphere or ball)");
}

void validate_point_set(const PointSet& points) {
  if (points.n < 1 || points.d < 1) {
    throw std::invalid_argument("point set: n and d must be positive");
  }
  if (points.data.size() != points.n * points.d) {
    throw std::invalid_argument("point set: data size does not match n*d");
  }
  for (std::size_t i = 0; i < points.n; ++i) {
    const double nrm = norm(points.point(i));
    if (!std::isfinite(nrm)) {
      throw std::invalid_argument("point set: point " + std::to_string(i) + " is not finite");
    }
    if (points.mode == Mode::Sphere) {
      if (std::abs(nrm - 1.0) > 1e-9) {
        throw std::invalid_argument("point set: point " + std::to_string(i) +
                                    " is not unit norm (|x| = " + std::to_string(nrm) + ")");
      }
    } else {
      if (nrm <= 0.0 || nrm > 1.0 + 1e-12) {
        throw std::invalid_argument("point set: point " + std::to_string(i) +
                                    " is outside the unit ball (|x| = " + std::to_string(nrm) +
                                    ")");
      }
    }
  }
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double sq_dist(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

}  // namespace hypersketch
