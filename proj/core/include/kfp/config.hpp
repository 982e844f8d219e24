#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfp/grid.hpp"
#include "kfp/operators.hpp"
#include "kfp/solver.hpp"
#include "kfp/verify.hpp"

namespace kfp {

// Full description of one run, parsed from a sectioned key = value text:
//
//   [grid]      dim, L, N
//   [operator]  gamma, s
//   [solver]    method, dt (number or "auto"), t_end, samples (count or
//               comma list of times), sample_decades, krylov_tol,
//               krylov_max_iter
//   [initial]   kind, amplitude, width, epsilon, seed
//   [source]    kind, amplitude, width, time_decay
//   [verify]    k_max, gevrey_threshold, family_spread_max, t_min,
//               b0_mode, c_max, checks (comma list)
//   [output]    directory, csv, json, svg
//
// '#' and ';' start comments.  Unknown sections or keys are rejected.
// grid and operator are required; everything else has defaults.
struct RunConfig {
  GridSpec grid;
  OperatorParams params;
  SolverConfig solver;
  int sample_count = 32;
  double sample_decades = 2.0;
  InitialDataSpec initial;
  SourceSpec source;

  struct Verify {
    int k_max = 10;
    double gevrey_threshold = 3.0;
    double family_spread_max = 100.0;
    double t_min = 0.05;
    double c_max = 50.0;
    EnergyThreshold b0_mode = EnergyThreshold::finite_only;
    std::vector<std::string> checks = {"energy", "gevrey_frequency", "gevrey_weight"};
  } verify;

  struct Output {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
    bool svg = false;
  } output;

  // Sample times for the solver: the explicit list when given, otherwise
  // sample_count log-spaced points over sample_decades decades.
  std::vector<double> effective_sample_times() const;
};

// Throws ConfigError carrying 1-based line/column for syntax problems and
// the offending field name for validation problems.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// The effective configuration as structured data; embedded verbatim in
// reports so every artifact records what produced it.
nlohmann::json config_echo(const RunConfig& config);

}  // namespace kfp
