#include "kfp/dense_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kfp/operators.hpp"
#include "oracles.hpp"

namespace kfp {
namespace {

using testing::gaussian_field;
using testing::random_field;
using testing::rel_l2_err;

TEST(DenseExpm, TwoRoutesAgree) {
  const auto grid = make_grid(1, 8.0, 32);
  for (const auto& [gamma, s] : {std::pair{0.5, 0.5}, {-0.4, 0.7}}) {
    const auto params = make_operator_params(gamma, s);
    const Field u0 = gaussian_field(grid, 1.0);
    for (double t : {0.1, 0.5}) {
      const Field a = dense_expm_apply(u0, params, t);
      const Field b = dense_expm_apply_pade(u0, params, t);
      EXPECT_LT(rel_l2_err(a, b), 1e-10) << "gamma " << gamma << " s " << s << " t " << t;
    }
  }
}

TEST(DenseExpm, IdentityAtTimeZero) {
  const auto grid = make_grid(1, 6.0, 16);
  const auto params = make_operator_params(0.5, 0.5);
  std::mt19937_64 rng(7);
  const Field u0 = random_field(grid, rng);
  EXPECT_LT(rel_l2_err(dense_expm_apply(u0, params, 0.0), u0), 1e-12);
}

TEST(DenseExpm, SemigroupProperty) {
  const auto grid = make_grid(1, 6.0, 16);
  const auto params = make_operator_params(0.5, 0.5);
  const Field u0 = gaussian_field(grid, 1.5);
  const Field two_steps = dense_expm_apply(dense_expm_apply(u0, params, 0.2), params, 0.3);
  const Field one_step = dense_expm_apply(u0, params, 0.5);
  EXPECT_LT(rel_l2_err(two_steps, one_step), 1e-9);
}

TEST(DenseExpm, ContractsGaussianData) {
  const auto grid = make_grid(1, 8.0, 32);
  const auto params = make_operator_params(0.5, 0.5);
  const Field u0 = gaussian_field(grid, 1.0);
  double prev = l2_norm(u0);
  for (double t : {0.1, 0.3, 0.6, 1.0}) {
    const double now = l2_norm(dense_expm_apply(u0, params, t));
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(DenseSolve, ResidualAgainstAssembly) {
  const auto grid = make_grid(1, 6.0, 16);
  const auto params = make_operator_params(0.5, 0.5);
  std::mt19937_64 rng(11);
  const Field rhs = random_field(grid, rng);
  const double dt = 0.07;
  const Field w = dense_backward_euler_solve(rhs, params, dt);
  const DenseMatrix a = dense_assemble(params, grid);
  const auto aw = dense_apply(a, w.values);
  std::vector<Complex> reconstructed(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i)
    reconstructed[i] = w.values[i] + dt * aw[i];
  EXPECT_LT(rel_l2_err(reconstructed, rhs.values), 1e-11);
}

TEST(DenseNorm, BoundsRandomApplications) {
  const auto grid = make_grid(1, 6.0, 16);
  const auto params = make_operator_params(0.5, 0.5);
  const double norm = dense_operator_norm(params, grid);
  const DenseMatrix a = dense_assemble(params, grid);
  std::mt19937_64 rng(13);
  double best = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Field u = random_field(grid, rng);
    const auto au = dense_apply(a, u.values);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < au.size(); ++i) {
      num += std::norm(au[i]);
      den += std::norm(u.values[i]);
    }
    best = std::max(best, std::sqrt(num / den));
  }
  EXPECT_LE(best, norm * (1.0 + 1e-12));
  EXPECT_GT(best, 0.3 * norm);
}

TEST(DenseGuard, RejectsLargeGrids) {
  const auto grid = make_grid(2, 6.0, 128);  // 16384 points
  const auto params = make_operator_params(0.5, 0.5);
  EXPECT_THROW(dense_assemble(params, grid), std::invalid_argument);
  const Field u0 = make_field(grid);
  EXPECT_THROW(dense_expm_apply(u0, params, 0.1), std::invalid_argument);
}

TEST(DenseAssembly, TwoDimensionalAgreement) {
  std::mt19937_64 rng(19);
  const auto grid = make_grid(2, 5.0, 12);
  const auto params = make_operator_params(0.3, 0.6);
  const DenseMatrix a = dense_assemble(params, grid);
  const Field u = random_field(grid, rng);
  const Field fast = apply_kfp(u, params);
  const auto slow = dense_apply(a, u.values);
  EXPECT_LT(rel_l2_err(fast.values, slow), 1e-12);
}

}  // namespace
}  // namespace kfp
