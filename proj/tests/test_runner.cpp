#include "kfp/runner.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "kfp/svg.hpp"

namespace kfp {
namespace {

namespace fs = std::filesystem;

std::string tmp_dir(const std::string& leaf) {
  const fs::path p = fs::path(::testing::TempDir()) / ("kfp_" + leaf);
  fs::remove_all(p);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  EXPECT_TRUE(in.good()) << p;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
  return cells;
}

const char* kSmallRun = R"(
[grid]
dim = 1
L = 8
N = 32

[operator]
gamma = 0.5
s = 0.5

[solver]
t_end = 0.2
samples = 4

[verify]
k_max = 4
)";

TEST(Run, ZeroDataProducesVacuousPassAndZeroRows) {
  RunConfig cfg = parse_config(std::string(kSmallRun) + "\n[initial]\namplitude = 0\n");
  RunOptions opt;
  opt.out_dir = tmp_dir("zero");
  const RunArtifacts art = run(cfg, opt);
  EXPECT_TRUE(art.all_passed);
  for (const auto& check : art.report.at("checks")) {
    EXPECT_TRUE(check.at("pass").get<bool>()) << check.at("name");
    EXPECT_TRUE(check.at("vacuous").get<bool>()) << check.at("name");
  }

  const auto lines = lines_of(slurp(fs::path(art.directory) / "trajectory.csv"));
  ASSERT_EQ(lines.size(), 2u + 5u);
  EXPECT_EQ(lines[0].rfind("# kfp-trajectory-csv-v", 0), 0u);
  const auto header = split_csv(lines[1]);
  ASSERT_EQ(header.size(), 4u + 2u * 5u);
  EXPECT_EQ(header[0], "t");
  EXPECT_EQ(header[1], "l2");
  EXPECT_EQ(header[4], "log10_a_0");
  EXPECT_EQ(header.back(), "log10_b_4");
  for (std::size_t row = 2; row < lines.size(); ++row) {
    const auto cells = split_csv(lines[row]);
    ASSERT_EQ(cells.size(), header.size());
    for (std::size_t col = 1; col < cells.size(); ++col)
      EXPECT_EQ(std::stod(cells[col]), 0.0) << "row " << row << " col " << col;
  }
  EXPECT_EQ(std::stod(split_csv(lines[2])[0]), 0.0);
  EXPECT_EQ(std::stod(split_csv(lines.back())[0]), 0.2);
}

TEST(Run, ReportShapeAndDiskCopyAgree) {
  RunConfig cfg = parse_config(kSmallRun);
  RunOptions opt;
  opt.out_dir = tmp_dir("report");
  opt.seed = 123;
  const RunArtifacts art = run(cfg, opt);

  for (const char* key :
       {"schema", "version", "mode", "seed", "config", "solver", "trajectory", "checks",
        "all_passed"}) {
    EXPECT_TRUE(art.report.contains(key)) << key;
  }
  EXPECT_EQ(art.report.at("seed").get<std::uint64_t>(), 123u);
  EXPECT_EQ(art.report.at("mode"), "run");
  EXPECT_GT(art.report.at("solver").at("steps_taken").get<std::uint64_t>(), 0u);
  EXPECT_EQ(art.report.at("trajectory").at("samples").get<int>(), 5);

  const nlohmann::json from_disk =
      nlohmann::json::parse(slurp(fs::path(art.directory) / "report.json"));
  EXPECT_EQ(from_disk, art.report);
}

TEST(Run, OutputDirectoryPrecedence) {
  const RunConfig cfg = parse_config(kSmallRun);
  const std::string env_dir = tmp_dir("env");
  const std::string opt_dir = tmp_dir("opt");

  ASSERT_EQ(setenv("KFP_OUT_DIR", env_dir.c_str(), 1), 0);
  EXPECT_EQ(resolve_out_dir(cfg, RunOptions{}), env_dir);
  RunOptions opt;
  opt.out_dir = opt_dir;
  EXPECT_EQ(resolve_out_dir(cfg, opt), opt_dir);
  ASSERT_EQ(unsetenv("KFP_OUT_DIR"), 0);
  EXPECT_EQ(resolve_out_dir(cfg, RunOptions{}), cfg.output.directory);
}

TEST(Run, RejectsUnknownCheckName) {
  RunConfig cfg = parse_config(kSmallRun);
  cfg.verify.checks = {"nonsense"};
  RunOptions opt;
  opt.out_dir = tmp_dir("badcheck");
  EXPECT_THROW(run(cfg, opt), std::invalid_argument);
}

TEST(Run, PlotFlagEmitsCharts) {
  RunConfig cfg = parse_config(kSmallRun);
  RunOptions opt;
  opt.out_dir = tmp_dir("plots");
  opt.plot = true;
  const RunArtifacts art = run(cfg, opt);
  for (const char* name : {"ladder_a.svg", "gevrey_constants.svg", "energy.svg"}) {
    const std::string content = slurp(fs::path(art.directory) / name);
    EXPECT_EQ(content.rfind("<svg", 0), 0u) << name;
  }
}

TEST(VerifyLemmas, CoarseGridIsFlaggedNotFailed) {
  RunConfig cfg = parse_config(R"(
[grid]
dim = 1
L = 8
N = 8

[operator]
gamma = 0.5
s = 0.5
)");
  RunOptions opt;
  opt.out_dir = tmp_dir("lemmas_coarse");
  const RunArtifacts art = verify_lemmas(cfg, opt);
  EXPECT_EQ(art.report.at("mode"), "verify-lemmas");
  EXPECT_FALSE(art.report.at("family").at("resolution_ok").get<bool>());
  ASSERT_GT(art.report.at("checks").size(), 0u);
  for (const auto& check : art.report.at("checks")) {
    EXPECT_TRUE(check.at("low_confidence").get<bool>()) << check.at("name");
    EXPECT_TRUE(check.at("fitted_constant").is_number()) << check.at("name");
  }
}

TEST(Sweep, GridOfRunsWithIndex) {
  RunConfig cfg = parse_config(std::string(kSmallRun) + "\n[verify]\nchecks = energy\n");
  RunOptions opt;
  opt.out_dir = tmp_dir("sweep");
  const RunArtifacts art = sweep(cfg, {0.0, 0.5}, {0.5, 0.75}, opt);
  EXPECT_TRUE(art.all_passed);
  ASSERT_EQ(art.report.at("entries").size(), 4u);

  int dirs = 0;
  for (const auto& entry : art.report.at("entries")) {
    const fs::path sub = fs::path(art.directory) / entry.at("directory").get<std::string>();
    EXPECT_TRUE(fs::exists(sub / "report.json")) << sub;
    ++dirs;
  }
  EXPECT_EQ(dirs, 4);

  const auto lines = lines_of(slurp(fs::path(art.directory) / "index.csv"));
  ASSERT_EQ(lines.size(), 2u + 4u);
  EXPECT_EQ(lines[0].rfind("# kfp-sweep-index-v", 0), 0u);
  const auto header = split_csv(lines[1]);
  EXPECT_EQ(header[0], "gamma");
  EXPECT_EQ(header[1], "s");

  EXPECT_THROW(sweep(cfg, {-2.0}, {0.5}, opt), std::runtime_error);
}

TEST(RenderSvg, NonFinitePointsSplitPolyline) {
  SvgChart chart;
  chart.title = "gap";
  chart.x_label = "x";
  chart.y_label = "y";
  SvgSeries series;
  series.label = "s";
  series.x = {0.0, 1.0, 2.0, 3.0};
  series.y = {1.0, 2.0, 1.5, 2.5};
  chart.series = {series};

  const std::string whole = render_svg(chart);
  const auto count = [](const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
      ++n;
    return n;
  };
  const std::size_t base = count(whole, "<polyline");

  chart.series[0].y[1] = std::numeric_limits<double>::quiet_NaN();
  const std::string gapped = render_svg(chart);
  EXPECT_EQ(count(gapped, "<polyline"), base + 1);

  chart.title = "a<b & c";
  const std::string escaped = render_svg(chart);
  EXPECT_NE(escaped.find("a&lt;b &amp; c"), std::string::npos);
}

}  // namespace
}  // namespace kfp
