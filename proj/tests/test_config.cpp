#include "kfp/config.hpp"

#include <gtest/gtest.h>

#include <string>

#include "kfp/errors.hpp"

namespace kfp {
namespace {

const char* kMinimalText = R"(
[grid]
dim = 1
L = 8
N = 32

[operator]
gamma = 0.5
s = 0.5
)";

TEST(ParseConfig, MinimalTextAndDefaults) {
  const RunConfig cfg = parse_config(kMinimalText);
  EXPECT_EQ(cfg.grid.dim, 1);
  EXPECT_DOUBLE_EQ(cfg.grid.half_width, 8.0);
  EXPECT_EQ(cfg.grid.n_per_axis, 32);
  EXPECT_DOUBLE_EQ(cfg.params.gamma, 0.5);
  EXPECT_DOUBLE_EQ(cfg.params.s, 0.5);

  EXPECT_EQ(cfg.solver.method, SolverConfig::Method::rk4);
  EXPECT_TRUE(cfg.solver.dt_auto);
  EXPECT_DOUBLE_EQ(cfg.solver.t_end, 1.0);
  EXPECT_EQ(cfg.sample_count, 32);
  EXPECT_EQ(cfg.initial.kind, InitialDataSpec::Kind::gaussian);
  EXPECT_TRUE(cfg.source.is_zero());
  EXPECT_EQ(cfg.verify.k_max, 10);
  ASSERT_EQ(cfg.verify.checks.size(), 3u);
  EXPECT_EQ(cfg.output.directory, "out");
  EXPECT_TRUE(cfg.output.csv);
  EXPECT_FALSE(cfg.output.svg);

  const auto times = cfg.effective_sample_times();
  ASSERT_EQ(times.size(), 32u);
  EXPECT_DOUBLE_EQ(times.back(), 1.0);
}

TEST(ParseConfig, ReadsShippedReferenceFile) {
  const RunConfig cfg = parse_config_file(std::string(KFP_CONFIG_DIR) + "/reference.conf");
  EXPECT_EQ(cfg.grid.n_per_axis, 512);
  EXPECT_DOUBLE_EQ(cfg.grid.half_width, 12.0);
  EXPECT_DOUBLE_EQ(cfg.params.gamma, 0.5);
  EXPECT_EQ(cfg.initial.kind, InitialDataSpec::Kind::rough_random);
  EXPECT_EQ(cfg.initial.seed, 7u);
  EXPECT_DOUBLE_EQ(cfg.verify.t_min, 0.1);
  EXPECT_EQ(cfg.output.directory, "out/reference");
}

TEST(ParseConfig, RejectsUnknownNamesWithPosition) {
  try {
    parse_config(std::string(kMinimalText) + "\n[grid]\nmisspelled = 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GT(e.line, 0);
    EXPECT_EQ(e.column, 1);
    EXPECT_NE(std::string(e.what()).find("misspelled"), std::string::npos);
  }

  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[nosuch]\nx = 1\n"), ConfigError);
}

TEST(ParseConfig, RejectsDuplicateKey) {
  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[grid]\nN = 64\n"), ConfigError);
}

TEST(ParseConfig, RejectsMissingRequiredSections) {
  EXPECT_THROW(parse_config("[grid]\ndim = 1\nL = 8\nN = 32\n"), ConfigError);
  EXPECT_THROW(parse_config("[operator]\ngamma = 0.5\ns = 0.5\n"), ConfigError);
}

TEST(ParseConfig, RejectsInadmissibleOperator) {
  std::string text = R"(
[grid]
dim = 1
L = 8
N = 32

[operator]
gamma = -1.5
s = 0.5
)";
  EXPECT_THROW(parse_config(text), ConfigError);
}

TEST(ParseConfig, RejectsGevreyChecksAtAnalyticEndpoint) {
  std::string text = R"(
[grid]
dim = 1
L = 8
N = 32

[operator]
gamma = 0.5
s = 1.0
)";
  EXPECT_THROW(parse_config(text), ConfigError);

  const RunConfig cfg = parse_config(text + "\n[verify]\nchecks = energy\n");
  EXPECT_DOUBLE_EQ(cfg.params.s, 1.0);
}

TEST(ParseConfig, SampleCountVersusExplicitList) {
  const RunConfig counted = parse_config(std::string(kMinimalText) + "\n[solver]\nsamples = 5\n");
  EXPECT_EQ(counted.sample_count, 5);
  EXPECT_EQ(counted.effective_sample_times().size(), 5u);

  const RunConfig listed =
      parse_config(std::string(kMinimalText) + "\n[solver]\nsamples = 0.1, 0.5, 1.0\n");
  const auto times = listed.effective_sample_times();
  ASSERT_EQ(times.size(), 3u);
  EXPECT_DOUBLE_EQ(times[0], 0.1);
  EXPECT_DOUBLE_EQ(times[2], 1.0);

  EXPECT_THROW(
      parse_config(std::string(kMinimalText) + "\n[solver]\nsamples = 0.5, 0.1, 1.0\n"),
      ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[solver]\nsamples = 0.5, 2.0\n"),
               ConfigError);
}

TEST(ParseConfig, SolverStepField) {
  const RunConfig a = parse_config(std::string(kMinimalText) + "\n[solver]\ndt = auto\n");
  EXPECT_TRUE(a.solver.dt_auto);

  const RunConfig b = parse_config(std::string(kMinimalText) + "\n[solver]\ndt = 0.01\n");
  EXPECT_FALSE(b.solver.dt_auto);
  EXPECT_DOUBLE_EQ(b.solver.dt, 0.01);

  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[solver]\ndt = fast\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[solver]\ndt = -0.01\n"), ConfigError);
}

TEST(ParseConfig, RejectsMalformedScalars) {
  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[solver]\nt_end = 1.0x\n"),
               ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[solver]\nkrylov_max_iter = 3.5\n"),
               ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[output]\ncsv = maybe\n"),
               ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimalText) + "\n[solver]\nt_end =\n"), ConfigError);
}

TEST(ParseConfig, BooleanSpellings) {
  const RunConfig on = parse_config(std::string(kMinimalText) + "\n[output]\nsvg = on\n");
  EXPECT_TRUE(on.output.svg);
  const RunConfig off = parse_config(std::string(kMinimalText) + "\n[output]\ncsv = 0\n");
  EXPECT_FALSE(off.output.csv);
}

TEST(ConfigEcho, ReflectsEffectiveValues) {
  const RunConfig cfg = parse_config(std::string(kMinimalText) +
                                     "\n[solver]\ndt = 0.02\nt_end = 2.0\n[verify]\nk_max = 6\n");
  const nlohmann::json echo = config_echo(cfg);
  EXPECT_EQ(echo["grid"]["N"], 32);
  EXPECT_DOUBLE_EQ(echo["solver"]["dt"].get<double>(), 0.02);
  EXPECT_DOUBLE_EQ(echo["solver"]["t_end"].get<double>(), 2.0);
  EXPECT_EQ(echo["verify"]["k_max"], 6);

  const nlohmann::json auto_echo = config_echo(parse_config(kMinimalText));
  EXPECT_EQ(auto_echo["solver"]["dt"], "auto");
}

}  // namespace
}  // namespace kfp
