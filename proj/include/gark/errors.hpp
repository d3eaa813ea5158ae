#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gark {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct NonFinite : Error {
  using Error::Error;
};
struct ZeroWeight : Error {
  using Error::Error;
};
struct NotSymplectic : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct NotConjugate : Error {
  using Error::Error;
};
struct WeightsNotPalindromic : Error {
  using Error::Error;
};
struct OddStageCount : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};

struct StageSolveFailure : Error {
  StageSolveFailure(std::size_t group_id, double final_residual)
      : Error("stage solve failed in implicit group " + std::to_string(group_id) +
              " (residual " + std::to_string(final_residual) + ")"),
        group(group_id),
        residual(final_residual) {}
  std::size_t group;
  double residual;
};

// Wraps an error raised while stepping with the index of the failing step.
struct StepError : Error {
  StepError(std::size_t step_index, const std::string& what, bool solve_failure)
      : Error("step " + std::to_string(step_index) + ": " + what),
        step(step_index),
        is_solve_failure(solve_failure) {}
  std::size_t step;
  bool is_solve_failure;
};

}  // namespace gark
