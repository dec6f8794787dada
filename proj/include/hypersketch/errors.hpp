#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypersketch {

// Input violates a documented hypothesis of the sketch construction
// (accuracy too coarse for the point set, degenerate pairs, ...).
// The CLI maps this to exit code 2.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Coincident or antipodal normalized points. These sets have no valid plan.
class DegenerateInputError : public PreconditionError {
 public:
  DegenerateInputError(const std::string& msg, std::size_t i, std::size_t j)
      : PreconditionError(msg), pair_i(i), pair_j(j) {}
  std::size_t pair_i;
  std::size_t pair_j;
};

// Corrupted or malformed on-disk data (bad magic, CRC mismatch, truncation).
// The CLI maps this to exit code 3.
class DataIntegrityError : public std::runtime_error {
 public:
  explicit DataIntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested computation exceeds the configured compute budget. Carries the
// estimated op count so callers can report exactly why the run was refused.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& msg, double estimated_ops, double budget_ops)
      : std::runtime_error(msg), estimated_ops(estimated_ops), budget_ops(budget_ops) {}
  double estimated_ops;
  double budget_ops;
};

}  // namespace hypersketch
