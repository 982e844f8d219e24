#pragma once

#include <cstdint>
#include <vector>

#include "kfp/grid.hpp"
#include "kfp/norms.hpp"
#include "kfp/operators.hpp"

namespace kfp {

// Right-hand side f(t, v).  Gaussian sources are analytic with all
// exponential moments, so they satisfy every source hypothesis the
// verification layer needs; zero trivially does.
struct SourceSpec {
  enum class Kind { zero, gaussian };
  Kind kind = Kind::zero;
  double amplitude = 1.0;
  double width = 1.0;       // spatial scale sigma
  double time_decay = 0.0;  // f = amplitude * exp(-time_decay*t) * exp(-|v|^2/(2 width^2))

  bool is_zero() const { return kind == Kind::zero || amplitude == 0.0; }
};

Field source_field(const SourceSpec& source, const GridSpec& grid, double t);

struct SolverConfig {
  enum class Method { rk4, backward_euler };
  Method method = Method::rk4;
  double dt = 0.0;      // used when dt_auto is false
  bool dt_auto = true;  // dt = stability_dt(params, grid)
  double t_end = 1.0;
  std::vector<double> sample_times;  // sorted, in (0, t_end]; filled by default_sample_times if empty
  double krylov_tol = 1e-10;
  int krylov_max_iter = 500;
};

// count samples log-spaced over `decades` decades ending at t_end.
std::vector<double> default_sample_times(double t_end, int count = 32, double decades = 2.0);

struct InitialDataSpec {
  enum class Kind { gaussian, rough_random };
  Kind kind = Kind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  // rough_random: real field with |u_hat(k)| = (1+|xi_k|^2)^{-(d/2+epsilon)/4},
  // uniform phases from the seed, normalized to unit L2 norm.
  double epsilon = 0.5;
  std::uint64_t seed = 0;
};

Field make_initial_data(const InitialDataSpec& spec, const GridSpec& grid);

struct TrajectorySample {
  double t = 0.0;
  Field state;
  NormReport report;
  double dissipation_h = 0.0;  // int_0^t ||u||^2_{H^s_{gamma/2}}
  double dissipation_w = 0.0;  // int_0^t ||u||^2_{2, gamma/2+s}
  double quad_form = 0.0;      // Re <A u, u>, the coercivity surrogate
  // Defect of the discrete balance d/dt ||u||^2 = -2 Re<Au,u> + 2 Re<f,u>
  // over one probe step from this sample; O(dt^4) for the RK4 method,
  // NaN when the trajectory was produced by another method.
  double energy_residual = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // samples[0] is the initial state at t = 0
  double dt_used = 0.0;
  std::uint64_t steps_taken = 0;
};

// 1.25 / symbol_bound: the stiffest mode sits at less than half the RK4
// real-axis stability boundary (~2.785), where the stability function still
// decays monotonically.
double stability_dt(const OperatorParams& params, const GridSpec& grid);

// One classical explicit Runge-Kutta step for du/dt = -A u + f(t).
Field step_rk4(const Field& u, double t, double dt, const OperatorParams& params,
               const SourceSpec& source);

// One implicit step: solves (I + dt A) w = u + dt f(t+dt) by preconditioned
// conjugate gradients on the diagonally symmetrized system.  Throws
// KrylovFailure when the relative residual does not reach tol.
Field step_backward_euler(const Field& u, double t, double dt, const OperatorParams& params,
                          const SourceSpec& source, double tol = 1e-10, int max_iter = 500);

// Integrates from t = 0 to t_end recording a NormReport at t = 0 and at
// every configured sample time.  Steps land exactly on sample times.
// Throws SolverAbort on non-finite state values.
Trajectory evolve(const Field& u0, const SolverConfig& config, const OperatorParams& params,
                  const SourceSpec& source, int k_max);
Trajectory evolve(const InitialDataSpec& u0spec, const GridSpec& grid, const SolverConfig& config,
                  const OperatorParams& params, const SourceSpec& source, int k_max);

}  // namespace kfp
