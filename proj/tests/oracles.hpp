#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "kfp/grid.hpp"

namespace kfp::testing {

inline double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

inline double rel_l2_err(const std::vector<Complex>& got, const std::vector<Complex>& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += std::norm(got[i] - want[i]);
    den += std::norm(want[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

inline double rel_l2_err(const Field& got, const Field& want) {
  return rel_l2_err(got.values, want.values);
}

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature, absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Least-squares slope of log(err) against log(dt).
inline double fit_slope(const std::vector<double>& dts, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline Field random_field(const GridSpec& grid, std::mt19937_64& rng) {
  Field u = make_field(grid);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& z : u.values) z = {dist(rng), dist(rng)};
  return u;
}

inline Field gaussian_field(const GridSpec& grid, double sigma) {
  Field u = make_field(grid);
  const auto vsq = axis_points_sq(grid);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  kfp::detail::for_each_radius_sq(
      grid, vsq, [&](std::size_t flat, double r2) { u.values[flat] = std::exp(-r2 * inv2s2); });
  return u;
}

}  // namespace kfp::testing
