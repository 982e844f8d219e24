#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfp/config.hpp"

namespace kfp {

struct RunOptions {
  std::optional<std::string> out_dir;  // beats KFP_OUT_DIR, beats config
  std::optional<std::uint64_t> seed;   // beats config (echoed as effective)
  bool plot = false;                   // emit charts even if the config does not
};

struct RunArtifacts {
  std::string directory;
  nlohmann::json report;
  bool all_passed = false;
};

std::string resolve_out_dir(const RunConfig& config, const RunOptions& options);

// Evolves the configured trajectory, runs the requested checks, and writes
// trajectory.csv, report.json, and optional charts into the output
// directory.  A state that is identically zero writes all-zero CSV rows
// (there is no log of zero to record).
RunArtifacts run(const RunConfig& config, const RunOptions& options = {});

// Commutator and interpolation estimate checks over the built-in probe
// family on the configured grid; same report format, no trajectory.
RunArtifacts verify_lemmas(const RunConfig& config, const RunOptions& options = {});

// One run per (gamma, s) pair, concurrently, each into subdirectory
// g<gamma>_s<s>; writes index.csv of fitted constants plus a combined
// report.json at the top level.
RunArtifacts sweep(const RunConfig& config, const std::vector<double>& gammas,
                   const std::vector<double>& s_values, const RunOptions& options = {});

}  // namespace kfp
