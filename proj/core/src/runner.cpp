#include "kfp/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <stdexcept>

#include "kfp/errors.hpp"
#include "kfp/svg.hpp"
#include "kfp/version.hpp"

namespace kfp {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, int k_max) {
  constexpr double ln10 = 2.302585092994045684;
  std::string out;
  out += "# ";
  out += kTrajectorySchema;
  out += "\n";
  out += "t,l2,h_s_gamma2,w_gamma2s";
  for (int k = 0; k <= k_max; ++k) out += ",log10_a_" + std::to_string(k);
  for (int k = 0; k <= k_max; ++k) out += ",log10_b_" + std::to_string(k);
  out += "\n";
  for (const auto& s : traj.samples) {
    const bool zero_state = s.report.l2 == 0.0;
    out += num(s.t) + "," + num(s.report.l2) + "," + num(s.report.h_s_gamma2) + "," +
           num(s.report.w_gamma2s);
    const auto emit_ladder = [&](const std::vector<double>& log_ladder) {
      for (int k = 0; k <= k_max; ++k) {
        const double lg = (zero_state || k >= static_cast<int>(log_ladder.size()))
                              ? 0.0
                              : log_ladder[static_cast<std::size_t>(k)] / ln10;
        out += "," + num(lg);
      }
    };
    emit_ladder(s.report.log_a);
    emit_ladder(s.report.log_b);
    out += "\n";
  }
  write_text(path, out);
}

nlohmann::json check_to_json(const CheckResult& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["fitted_constant"] = c.fitted_constant;
  j["stability_ratio"] = c.stability_ratio;
  j["threshold"] = c.threshold;
  j["pass"] = c.pass;
  j["vacuous"] = c.vacuous;
  j["truncation_limited"] = c.truncation_limited;
  j["low_confidence"] = c.low_confidence;
  j["note"] = c.note;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.details)
    rows.push_back({{"label", r.label}, {"value", r.value}, {"aux", r.aux}});
  j["details"] = rows;
  return j;
}

std::vector<std::string> grid_warnings(const Trajectory& traj, const GridSpec& grid,
                                       const OperatorParams& params) {
  std::vector<std::string> warnings;
  const Field& u = traj.samples.back().state;
  const double sigma_w = params.weight_exponent();

  double max_w = 0.0, max_w_boundary = 0.0;
  const auto pts_sq = axis_points_sq(grid);
  detail::for_each_radius_sq(grid, pts_sq, [&](std::size_t flat, double r2) {
    const double m = detail::half_power_log1p(r2, sigma_w) *
                     std::abs(u.values[flat]);
    max_w = std::max(max_w, m);
    if (on_spatial_boundary(grid, flat)) max_w_boundary = std::max(max_w_boundary, m);
  });
  if (max_w > 0.0 && max_w_boundary > 1e-10 * max_w)
    warnings.push_back("weighted state at the spatial boundary is " + num3(max_w_boundary) +
                       " (" + num3(max_w_boundary / max_w) +
                       " of the field maximum); enlarge L if weight ladders stall");

  const SpectralField c = to_spectral(u);
  double max_c = 0.0, max_c_boundary = 0.0;
  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    const double m = std::abs(c.coefficients[i]);
    max_c = std::max(max_c, m);
    if (on_frequency_boundary(grid, i)) max_c_boundary = std::max(max_c_boundary, m);
  }
  if (max_c > 0.0 && max_c_boundary > 1e-10 * max_c)
    warnings.push_back("spectrum at the frequency boundary is " + num3(max_c_boundary) + " (" +
                       num3(max_c_boundary / max_c) +
                       " of the peak); increase N if frequency ladders stall");
  return warnings;
}

void write_charts(const std::string& dir, const Trajectory& traj, const RunConfig& config) {
  constexpr double ln10 = 2.302585092994045684;
  const int k_max = config.verify.k_max;

  SvgChart ladder;
  ladder.title = "Frequency ladder";
  ladder.x_label = "k";
  ladder.y_label = "log10 a_k";
  const std::size_t n = traj.samples.size();
  const std::size_t count = std::min<std::size_t>(6, n);
  for (std::size_t pick = 0; pick < count; ++pick) {
    const std::size_t idx = (count == 1) ? n - 1 : pick * (n - 1) / (count - 1);
    const auto& s = traj.samples[idx];
    SvgSeries series;
    series.label = "t = " + num3(s.t);
    for (int k = 0; k <= k_max && k < static_cast<int>(s.report.log_a.size()); ++k) {
      series.x.push_back(k);
      series.y.push_back(s.report.log_a[static_cast<std::size_t>(k)] / ln10);
    }
    ladder.series.push_back(std::move(series));
  }
  write_svg(ladder, dir + "/ladder_a.svg");

  SvgChart constants;
  constants.title = "Fitted growth constants, final sample";
  constants.x_label = "k";
  constants.y_label = "C_k";
  constants.log_y = true;
  const auto& last = traj.samples.back();
  const auto add_fit = [&](const std::vector<double>& log_seq, const std::string& label) {
    if (last.t <= 0.0 || log_seq.empty()) return;
    const GevreyFit fit =
        fit_gevrey(std::span<const double>(log_seq.data(), log_seq.size()), last.t, k_max,
                   config.verify.gevrey_threshold);
    SvgSeries series;
    series.label = label;
    for (int k = 1; k <= fit.k_fit && k < static_cast<int>(fit.per_k_constant.size()); ++k) {
      series.x.push_back(k);
      series.y.push_back(fit.per_k_constant[static_cast<std::size_t>(k)]);
    }
    constants.series.push_back(std::move(series));
  };
  if (last.report.l2 > 0.0) {
    add_fit(last.report.log_a, "frequency");
    add_fit(last.report.log_b, "weight");
  }
  write_svg(constants, dir + "/gevrey_constants.svg");

  SvgChart energy;
  energy.title = "Energy functional";
  energy.x_label = "t";
  energy.y_label = "E(t)";
  SvgSeries e_total{"l2^2 + dissipation", {}, {}};
  SvgSeries e_l2{"l2^2", {}, {}};
  for (const auto& s : traj.samples) {
    const double l2sq = s.report.l2 * s.report.l2;
    e_total.x.push_back(s.t);
    e_total.y.push_back(l2sq + s.dissipation_h + s.dissipation_w);
    e_l2.x.push_back(s.t);
    e_l2.y.push_back(l2sq);
  }
  energy.series.push_back(std::move(e_total));
  energy.series.push_back(std::move(e_l2));
  write_svg(energy, dir + "/energy.svg");
}

// dump() serializes non-finite numbers as null; normalizing the tree up
// front keeps the in-memory report identical to its disk image.
void sanitize_nonfinite(nlohmann::json& j) {
  if (j.is_structured()) {
    for (auto& item : j) sanitize_nonfinite(item);
  } else if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    j = nullptr;
  }
}

nlohmann::json base_report(const RunConfig& config, const std::string& mode) {
  nlohmann::json report;
  report["schema"] = kReportSchema;
  report["version"] = kVersion;
  report["mode"] = mode;
  report["seed"] = config.initial.seed;
  report["config"] = config_echo(config);
  return report;
}

std::string sweep_dir_name(double gamma, double s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "g%g_s%g", gamma, s);
  return buf;
}

}  // namespace

std::string resolve_out_dir(const RunConfig& config, const RunOptions& options) {
  if (options.out_dir) return *options.out_dir;
  if (const char* env = std::getenv("KFP_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return config.output.directory;
}

RunArtifacts run(const RunConfig& config_in, const RunOptions& options) {
  RunConfig config = config_in;
  if (options.seed) config.initial.seed = *options.seed;

  SolverConfig solver = config.solver;
  solver.sample_times = config.effective_sample_times();

  const std::string dir = resolve_out_dir(config, options);
  std::filesystem::create_directories(dir);

  const Trajectory traj = evolve(config.initial, config.grid, solver, config.params,
                                 config.source, config.verify.k_max);

  std::vector<CheckResult> checks;
  for (const auto& name : config.verify.checks) {
    if (name == "energy") {
      checks.push_back(check_energy(traj, config.params, config.verify.b0_mode, config.source,
                                    config.verify.c_max));
    } else if (name == "gevrey_frequency" || name == "gevrey_weight") {
      GevreyCheckOptions opts;
      opts.t_min = config.verify.t_min;
      opts.threshold = config.verify.gevrey_threshold;
      checks.push_back(name == "gevrey_frequency"
                           ? check_gevrey_frequency(traj, config.params, config.verify.k_max, opts)
                           : check_gevrey_weight(traj, config.params, config.verify.k_max, opts));
    } else {
      throw std::invalid_argument("unknown check '" + name + "'");
    }
  }

  bool all_passed = true;
  for (const auto& c : checks) all_passed = all_passed && c.pass;

  nlohmann::json report = base_report(config, "run");
  report["solver"] = {{"dt_used", traj.dt_used},
                      {"steps_taken", traj.steps_taken},
                      {"stability_dt", stability_dt(config.params, config.grid)}};
  const auto& first = traj.samples.front();
  const auto& last = traj.samples.back();
  report["trajectory"] = {{"samples", traj.samples.size()},
                          {"t_final", last.t},
                          {"l2_initial", first.report.l2},
                          {"l2_final", last.report.l2},
                          {"h_s_gamma2_final", last.report.h_s_gamma2},
                          {"w_gamma2s_final", last.report.w_gamma2s},
                          {"k_reliable_final", last.report.k_reliable_a}};
  report["grid_warnings"] = grid_warnings(traj, config.grid, config.params);
  nlohmann::json jchecks = nlohmann::json::array();
  for (const auto& c : checks) jchecks.push_back(check_to_json(c));
  report["checks"] = jchecks;
  report["all_passed"] = all_passed;
  sanitize_nonfinite(report);

  if (config.output.csv) write_trajectory_csv(dir + "/trajectory.csv", traj, config.verify.k_max);
  if (config.output.json) write_text(dir + "/report.json", report.dump(2) + "\n");
  if (config.output.svg || options.plot) write_charts(dir, traj, config);

  return {dir, std::move(report), all_passed};
}

RunArtifacts verify_lemmas(const RunConfig& config_in, const RunOptions& options) {
  RunConfig config = config_in;
  if (options.seed) config.initial.seed = *options.seed;

  const std::string dir = resolve_out_dir(config, options);
  std::filesystem::create_directories(dir);

  const TestFamily family = make_test_family(config.grid);
  const double spread = config.verify.family_spread_max;

  std::vector<CheckResult> checks;
  for (const auto& [r, m] : {std::pair{0.6, 2.0}, {1.5, 2.0}, {1.0, -1.0}})
    checks.push_back(check_commutator(family, r, m, spread));
  const double eps_list[] = {0.5, 0.1, 0.01};
  checks.push_back(check_interpolation_eps(family, 1.0, 1.0, 1.0, eps_list));
  for (const auto& [k, l, delta] :
       {std::tuple{1.0, 1.0, 0.5}, {0.5, 1.0, 0.25}, {2.0, 2.0, 1.0}})
    checks.push_back(check_interpolation_product(family, k, l, delta, spread));

  bool all_passed = true;
  for (const auto& c : checks) all_passed = all_passed && c.pass;

  nlohmann::json report = base_report(config, "verify-lemmas");
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : family.labels) labels.push_back(l);
  report["family"] = {{"members", family.members.size()},
                      {"labels", labels},
                      {"resolution_ok", family.resolution_ok}};
  nlohmann::json jchecks = nlohmann::json::array();
  for (const auto& c : checks) jchecks.push_back(check_to_json(c));
  report["checks"] = jchecks;
  report["all_passed"] = all_passed;
  sanitize_nonfinite(report);

  if (config.output.json) write_text(dir + "/report.json", report.dump(2) + "\n");
  return {dir, std::move(report), all_passed};
}

RunArtifacts sweep(const RunConfig& config, const std::vector<double>& gammas,
                   const std::vector<double>& s_values, const RunOptions& options) {
  if (gammas.empty() || s_values.empty())
    throw std::invalid_argument("sweep needs at least one gamma and one s");

  const std::string base = resolve_out_dir(config, options);
  std::filesystem::create_directories(base);

  struct Entry {
    double gamma = 0.0, s = 0.0;
    std::string name;
    RunArtifacts artifacts;
  };

  std::vector<std::pair<double, double>> combos;
  for (double g : gammas)
    for (double s : s_values) combos.emplace_back(g, s);
  for (const auto& [g, s] : combos) {
    try {
      (void)make_operator_params(g, s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, 0, "sweep entry " + sweep_dir_name(g, s) + ": " + e.what());
    }
  }

  std::vector<std::future<Entry>> futures;
  futures.reserve(combos.size());
  for (const auto& [g, s] : combos) {
    futures.push_back(std::async(std::launch::async, [&, g = g, s = s]() {
      Entry entry;
      entry.gamma = g;
      entry.s = s;
      entry.name = sweep_dir_name(g, s);
      RunConfig sub = config;
      sub.params = make_operator_params(g, s);
      RunOptions sub_options;
      sub_options.out_dir = base + "/" + entry.name;
      sub_options.seed = options.seed;
      sub_options.plot = options.plot;
      entry.artifacts = run(sub, sub_options);
      return entry;
    }));
  }

  std::vector<Entry> entries;
  entries.reserve(futures.size());
  std::string first_error;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    try {
      entries.push_back(futures[i].get());
    } catch (const std::exception& e) {
      if (first_error.empty())
        first_error = "sweep entry " + sweep_dir_name(combos[i].first, combos[i].second) + ": " +
                      e.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);

  std::string index;
  index += "# kfp-sweep-index-v1\n";
  index += "gamma,s,directory,all_passed";
  const auto& first_checks = entries.front().artifacts.report.at("checks");
  for (const auto& c : first_checks) {
    const std::string n = c.at("name").get<std::string>();
    index += "," + n + "_constant," + n + "_ratio," + n + "_pass";
  }
  index += "\n";
  for (const auto& e : entries) {
    index += num(e.gamma) + "," + num(e.s) + "," + e.name + "," +
             (e.artifacts.all_passed ? "1" : "0");
    for (const auto& c : e.artifacts.report.at("checks")) {
      index += "," + num(c.at("fitted_constant").get<double>());
      index += "," + num(c.at("stability_ratio").get<double>());
      index += c.at("pass").get<bool>() ? ",1" : ",0";
    }
    index += "\n";
  }
  write_text(base + "/index.csv", index);

  bool all_passed = true;
  nlohmann::json jentries = nlohmann::json::array();
  for (const auto& e : entries) {
    all_passed = all_passed && e.artifacts.all_passed;
    jentries.push_back({{"gamma", e.gamma},
                        {"s", e.s},
                        {"directory", e.name},
                        {"all_passed", e.artifacts.all_passed}});
  }
  nlohmann::json report = base_report(config, "sweep");
  report["entries"] = jentries;
  report["all_passed"] = all_passed;
  sanitize_nonfinite(report);
  write_text(base + "/report.json", report.dump(2) + "\n");

  return {base, std::move(report), all_passed};
}

}  // namespace kfp
