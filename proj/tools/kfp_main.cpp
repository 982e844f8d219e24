#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kfp/config.hpp"
#include "kfp/errors.hpp"
#include "kfp/runner.hpp"
#include "kfp/version.hpp"

// Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error,
// 3 solver or linear-algebra abort, 4 internal error.  Errors print a
// one-line diagnostic JSON to stderr.

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "configuration file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (beats KFP_OUT_DIR and the config)");
  cmd->add_option("--seed", args.seed, "override the initial-data seed")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--plot", args.plot, "emit SVG charts");
}

kfp::RunOptions to_options(const CommonArgs& args) {
  kfp::RunOptions options;
  if (!args.out_dir.empty()) options.out_dir = args.out_dir;
  if (args.seed >= 0) options.seed = static_cast<std::uint64_t>(args.seed);
  options.plot = args.plot;
  return options;
}

int diagnostic(const char* kind, const std::string& message, int code,
               nlohmann::json extra = nlohmann::json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  std::fprintf(stderr, "%s\n", extra.dump().c_str());
  return code;
}

// Reports store non-finite numbers as null; render those as "-".
std::string number_or_dash(const nlohmann::json& node, const char* key) {
  if (!node.contains(key) || !node.at(key).is_number()) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", node.at(key).get<double>());
  return buf;
}

void print_summary(const kfp::RunArtifacts& artifacts) {
  const auto& report = artifacts.report;
  if (report.contains("checks")) {
    for (const auto& c : report.at("checks")) {
      std::string flags;
      if (c.at("vacuous").get<bool>()) flags += " [vacuous]";
      if (c.at("truncation_limited").get<bool>()) flags += " [truncation-limited]";
      if (c.at("low_confidence").get<bool>()) flags += " [low-confidence]";
      std::printf("%-6s %-28s constant=%-12s ratio=%-10s threshold=%s%s\n",
                  c.at("pass").get<bool>() ? "PASS" : "FAIL",
                  c.at("name").get<std::string>().c_str(),
                  number_or_dash(c, "fitted_constant").c_str(),
                  number_or_dash(c, "stability_ratio").c_str(),
                  number_or_dash(c, "threshold").c_str(), flags.c_str());
    }
  }
  if (report.contains("entries")) {
    for (const auto& e : report.at("entries"))
      std::printf("%-6s gamma=%-8g s=%-8g %s\n", e.at("all_passed").get<bool>() ? "PASS" : "FAIL",
                  e.at("gamma").get<double>(), e.at("s").get<double>(),
                  e.at("directory").get<std::string>().c_str());
  }
  if (report.contains("grid_warnings"))
    for (const auto& w : report.at("grid_warnings"))
      std::printf("warning: %s\n", w.get<std::string>().c_str());
  std::printf("%s  artifacts: %s\n", artifacts.all_passed ? "all checks passed" : "CHECKS FAILED",
              artifacts.directory.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral solver and estimate checker for the fractional "
               "Kramers-Fokker-Planck operator"};
  app.set_version_flag("--version", kfp::kVersion);
  app.require_subcommand(1);

  CommonArgs run_args, lemma_args, sweep_args;
  std::vector<double> gammas, s_values;

  CLI::App* cmd_run =
      app.add_subcommand("run", "evolve a trajectory and run the configured checks");
  add_common(cmd_run, run_args);
  CLI::App* cmd_lemmas =
      app.add_subcommand("verify-lemmas", "run the estimate checks over the probe family");
  add_common(cmd_lemmas, lemma_args);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run each (gamma, s) combination");
  add_common(cmd_sweep, sweep_args);
  cmd_sweep->add_option("--gamma", gammas, "gamma values")->required()->delimiter(',');
  cmd_sweep->add_option("--s", s_values, "s values")->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  const CommonArgs& args =
      cmd_run->parsed() ? run_args : (cmd_lemmas->parsed() ? lemma_args : sweep_args);

  try {
    const kfp::RunConfig config = kfp::parse_config_file(args.config_path);
    const kfp::RunOptions options = to_options(args);
    kfp::RunArtifacts artifacts;
    if (cmd_run->parsed())
      artifacts = kfp::run(config, options);
    else if (cmd_lemmas->parsed())
      artifacts = kfp::verify_lemmas(config, options);
    else
      artifacts = kfp::sweep(config, gammas, s_values, options);
    print_summary(artifacts);
    return artifacts.all_passed ? 0 : 1;
  } catch (const kfp::ConfigError& e) {
    return diagnostic("config", e.what(), 2,
                      {{"line", e.line}, {"column", e.column}, {"file", args.config_path}});
  } catch (const kfp::SolverAbort& e) {
    return diagnostic("solver_abort", e.what(), 3, {{"step", e.step}, {"t", e.t}});
  } catch (const kfp::KrylovFailure& e) {
    return diagnostic("krylov_failure", e.what(), 3,
                      {{"residual", e.residual}, {"iterations", e.iterations}});
  } catch (const std::exception& e) {
    return diagnostic("internal", e.what(), 4);
  }
}
