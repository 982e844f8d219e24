#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kfp {

// Configuration text could not be parsed or validated.  line/column are
// 1-based; column 0 means "whole line" (validation rather than syntax).
struct ConfigError : std::runtime_error {
  ConfigError(int line_, int column_, const std::string& what_)
      : std::runtime_error("config:" + std::to_string(line_) + ":" + std::to_string(column_) +
                           ": " + what_),
        line(line_),
        column(column_) {}
  int line = 0;
  int column = 0;
};

// A time step produced a non-finite value; the integration is aborted
// rather than clamped.
struct SolverAbort : std::runtime_error {
  SolverAbort(std::uint64_t step_, double t_, const std::string& what_)
      : std::runtime_error("solver: " + what_ + " at step " + std::to_string(step_) +
                           ", t = " + std::to_string(t_)),
        step(step_),
        t(t_) {}
  std::uint64_t step = 0;
  double t = 0.0;
};

// The implicit-step Krylov iteration failed to reach the residual tolerance.
struct KrylovFailure : std::runtime_error {
  KrylovFailure(double residual_, int iterations_)
      : std::runtime_error("krylov: no convergence after " + std::to_string(iterations_) +
                           " iterations, relative residual " + std::to_string(residual_)),
        residual(residual_),
        iterations(iterations_) {}
  double residual = 0.0;
  int iterations = 0;
};

}  // namespace kfp
