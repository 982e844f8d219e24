#include "kfp/verify.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kfp/errors.hpp"
#include "oracles.hpp"

namespace kfp {
namespace {

using testing::rel_err;

TEST(Family, CompositionAndBandLimit) {
  const auto grid = make_grid(1, 16.0, 256);
  const TestFamily family = make_test_family(grid);
  ASSERT_EQ(family.members.size(), 8u);
  ASSERT_EQ(family.labels.size(), 8u);
  EXPECT_TRUE(family.resolution_ok);
  for (const auto& u : family.members) EXPECT_GT(l2_norm(u), 0.0);

  // The three random members are band-limited to |k| < N/8 with exact zeros
  // outside, so arbitrarily high frequency ladders stay meaningful.
  for (std::size_t i = 5; i < 8; ++i) {
    const auto c = to_spectral(family.members[i]);
    double peak = 0.0;
    for (const auto& z : c.coefficients) peak = std::max(peak, std::abs(z));
    const int band = grid.n_per_axis / 8;
    for (int slot = 0; slot < grid.n_per_axis; ++slot) {
      if (std::abs(grid.wavenumber(slot)) > band) {
        EXPECT_LE(std::abs(c.coefficients[static_cast<std::size_t>(slot)]), 1e-13 * peak)
            << "member " << i << " slot " << slot;
      }
    }
  }
}

TEST(Family, FlagsUnderResolvedGrid) {
  const TestFamily family = make_test_family(make_grid(1, 16.0, 8));
  EXPECT_FALSE(family.resolution_ok);
}

TEST(CommutatorCheck, VanishesForZeroWeightExponent) {
  const auto grid = make_grid(1, 16.0, 256);
  const TestFamily family = make_test_family(grid);
  const CheckResult res = check_commutator(family, 1.5, 0.0);
  EXPECT_TRUE(res.pass);
  EXPECT_EQ(res.fitted_constant, 0.0);
  EXPECT_DOUBLE_EQ(res.stability_ratio, 1.0);
}

TEST(CommutatorCheck, StableAcrossFamily) {
  const auto grid = make_grid(1, 16.0, 256);
  const TestFamily family = make_test_family(grid);
  for (const auto& [r, m] : {std::pair{0.6, 2.0}, std::pair{1.5, 2.0}, std::pair{1.0, -1.0}}) {
    const CheckResult res = check_commutator(family, r, m);
    EXPECT_TRUE(res.pass) << res.name;
    EXPECT_FALSE(res.vacuous);
    EXPECT_FALSE(res.low_confidence);
    EXPECT_GT(res.fitted_constant, 0.0);
    EXPECT_TRUE(std::isfinite(res.fitted_constant));
    EXPECT_LE(res.stability_ratio, 100.0);
    EXPECT_EQ(res.details.size(), family.members.size());
  }
  EXPECT_THROW(check_commutator(family, 0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(check_commutator(family, -0.5, 2.0), std::invalid_argument);
}

TEST(CommutatorCheck, LowConfidenceOnCoarseGrid) {
  const TestFamily family = make_test_family(make_grid(1, 16.0, 8));
  const CheckResult res = check_commutator(family, 0.6, 2.0);
  EXPECT_TRUE(res.low_confidence);
}

TEST(InterpolationEps, ConstantGrowsAsEpsilonShrinks) {
  const auto grid = make_grid(1, 16.0, 256);
  const TestFamily family = make_test_family(grid);
  const std::vector<double> eps = {0.5, 0.1, 0.01};
  const CheckResult res = check_interpolation_eps(family, 1.0, 1.0, 1.0, eps);
  EXPECT_TRUE(res.pass);
  ASSERT_EQ(res.details.size(), eps.size());
  for (const auto& row : res.details) EXPECT_TRUE(std::isfinite(row.value));
  for (std::size_t i = 1; i < res.details.size(); ++i)
    EXPECT_GE(res.details[i].value, res.details[i - 1].value);
  EXPECT_EQ(res.fitted_constant, res.details.back().value);
}

TEST(InterpolationProduct, RatioMatchesManualRecomputation) {
  const auto grid = make_grid(1, 16.0, 256);
  const TestFamily family = make_test_family(grid);
  const double k = 1.0, l = 1.0, delta = 0.5;
  const CheckResult res = check_interpolation_product(family, k, l, delta);
  EXPECT_TRUE(res.pass);
  ASSERT_EQ(res.details.size(), family.members.size());

  const Field& u = family.members[0];
  const double lhs = std::pow(weighted_sobolev(u, k, l), 2);
  const double rhs = weighted_sobolev(u, k + delta, 2.0 * l) * weighted_sobolev(u, k - delta, 0.0);
  EXPECT_LT(rel_err(res.details[0].value, lhs / rhs), 1e-12);

  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (const auto& row : res.details) {
    hi = std::max(hi, row.value);
    lo = std::min(lo, row.value);
  }
  EXPECT_LT(rel_err(res.fitted_constant, hi), 1e-12);
  EXPECT_LT(rel_err(res.stability_ratio, hi / lo), 1e-12);
}

Trajectory short_run(double gamma, double s, double amplitude = 1.0,
                     SourceSpec source = {}) {
  const auto grid = make_grid(1, 12.0, 128);
  const auto params = make_operator_params(gamma, s);
  InitialDataSpec init;
  init.amplitude = amplitude;
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.sample_times = default_sample_times(0.5, 12);
  return evolve(init, grid, cfg, params, source, 8);
}

TEST(EnergyCheck, ZeroTrajectoryIsVacuous) {
  const Trajectory traj = short_run(0.5, 0.5, 0.0);
  const auto params = make_operator_params(0.5, 0.5);
  const CheckResult res = check_energy(traj, params, EnergyThreshold::finite_only);
  EXPECT_TRUE(res.pass);
  EXPECT_TRUE(res.vacuous);
}

TEST(EnergyCheck, TracksTotalEnergy) {
  const Trajectory traj = short_run(0.5, 0.5);
  const auto params = make_operator_params(0.5, 0.5);
  const CheckResult res = check_energy(traj, params, EnergyThreshold::finite_only);
  EXPECT_TRUE(res.pass);
  EXPECT_FALSE(res.vacuous);

  double max_e = 0.0;
  for (const auto& s : traj.samples) {
    const double e = s.report.l2 * s.report.l2 + s.dissipation_h + s.dissipation_w;
    max_e = std::max(max_e, e);
  }
  EXPECT_LT(rel_err(res.fitted_constant, max_e), 1e-12);
}

TEST(EnergyCheck, ExponentialEnvelopeWithSource) {
  SourceSpec src;
  src.kind = SourceSpec::Kind::gaussian;
  src.amplitude = 0.5;
  const Trajectory traj = short_run(0.5, 0.5, 1.0, src);
  const auto params = make_operator_params(0.5, 0.5);
  const CheckResult res =
      check_energy(traj, params, EnergyThreshold::exponential_envelope, src, 50.0);
  EXPECT_TRUE(res.pass);
  EXPECT_GE(res.stability_ratio, 0.0);
  EXPECT_LE(res.stability_ratio, 50.0);
}

TEST(GevreyChecks, RejectAnalyticEndpointExponent) {
  const Trajectory traj = short_run(0.5, 1.0);
  const auto params = make_operator_params(0.5, 1.0);
  EXPECT_THROW(check_gevrey_frequency(traj, params, 8), std::invalid_argument);
}

TEST(GevreyChecks, ZeroTrajectoryIsVacuous) {
  const Trajectory traj = short_run(0.5, 0.5, 0.0);
  const auto params = make_operator_params(0.5, 0.5);
  const CheckResult f = check_gevrey_frequency(traj, params, 8);
  EXPECT_TRUE(f.pass);
  EXPECT_TRUE(f.vacuous);
  const CheckResult w = check_gevrey_weight(traj, params, 8);
  EXPECT_TRUE(w.pass);
  EXPECT_TRUE(w.vacuous);
}

Trajectory rough_run(double gamma, double s, double t_end = 0.5) {
  const auto grid = make_grid(1, 12.0, 512);
  const auto params = make_operator_params(gamma, s);
  InitialDataSpec init;
  init.kind = InitialDataSpec::Kind::rough_random;
  init.epsilon = 0.5;
  init.seed = 7;
  SolverConfig cfg;
  cfg.t_end = t_end;
  cfg.sample_times = default_sample_times(t_end, 12);
  return evolve(init, grid, cfg, params, SourceSpec{}, 10);
}

TEST(GevreyChecks, SmoothingRunPasses) {
  const Trajectory traj = rough_run(0.5, 0.5);
  const auto params = make_operator_params(0.5, 0.5);
  GevreyCheckOptions opts;
  opts.t_min = 0.1;
  const CheckResult f = check_gevrey_frequency(traj, params, 10, opts);
  EXPECT_TRUE(f.pass) << f.note;
  EXPECT_FALSE(f.vacuous);
  EXPECT_GT(f.fitted_constant, 0.0);

  const CheckResult w = check_gevrey_weight(traj, params, 10, opts);
  EXPECT_TRUE(w.pass) << w.note;
  EXPECT_FALSE(w.truncation_limited);
  EXPECT_GT(w.fitted_constant, 0.0);
}

TEST(GevreyChecks, WeakConfinementPinsWeightLadder) {
  // With gamma = 0 the rough datum keeps filling the box, so the high weight
  // moments sit at the truncation ceiling <L>^{(gamma/2+s)k} ||u|| instead of
  // revealing a genuine decay envelope.
  const Trajectory traj = rough_run(0.0, 0.5, 1.0);
  const auto params = make_operator_params(0.0, 0.5);
  GevreyCheckOptions opts;
  opts.t_min = 0.1;
  const CheckResult w = check_gevrey_weight(traj, params, 10, opts);
  EXPECT_TRUE(w.truncation_limited);
  EXPECT_FALSE(w.pass);
}

}  // namespace
}  // namespace kfp
