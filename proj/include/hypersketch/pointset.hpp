#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hypersketch {

enum class Mode : std::uint8_t { Sphere = 0, Ball = 1 };

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

// n points in R^d, row-major. Sphere mode: all norms within 1e-9 of 1.
// Ball mode: all norms in (0, 1].
struct PointSet {
  Mode mode = Mode::Sphere;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> data;     // n * d
  std::string provenance;      // generator spec + seed, or source file

  std::span<const double> point(std::size_t i) const { return {data.data() + i * d, d}; }
  std::span<double> point(std::size_t i) { return {data.data() + i * d, d}; }
};

// Throws std::invalid_argument when shape or norms violate the mode
// invariants above.
void validate_point_set(const PointSet& points);

double norm(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double sq_dist(std::span<const double> x, std::span<const double> y);

}  // namespace hypersketch
