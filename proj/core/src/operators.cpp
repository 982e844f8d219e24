#include "kfp/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace kfp {

namespace detail {

double half_power_log1p(double x_sq, double m) { return std::exp(0.5 * m * std::log1p(x_sq)); }

}  // namespace detail

OperatorParams make_operator_params(double gamma, double s) {
  if (!(s > 0.0) || s > 1.0) throw std::invalid_argument("operator: s must lie in (0, 1]");
  if (!(gamma + 2.0 * s > 0.0)) throw std::invalid_argument("operator: gamma + 2s must be positive");
  if (!std::isfinite(gamma)) throw std::invalid_argument("operator: gamma must be finite");
  return OperatorParams{gamma, s};
}

Field bracket_weight(const GridSpec& grid, double m) {
  Field w = make_field(grid);
  const auto vsq = axis_points_sq(grid);
  detail::for_each_radius_sq(grid, vsq, [&](std::size_t flat, double r2) {
    w.values[flat] = detail::half_power_log1p(r2, m);
  });
  return w;
}

SpectralField bessel_power(const SpectralField& c, double r) {
  SpectralField out = c;
  const auto xisq = axis_frequencies_sq(c.grid);
  detail::for_each_radius_sq(c.grid, xisq, [&](std::size_t flat, double r2) {
    out.coefficients[flat] *= detail::half_power_log1p(r2, r);
  });
  return out;
}

Field bessel_power(const Field& u, double r) { return to_physical(bessel_power(to_spectral(u), r)); }

Field apply_kfp(const Field& u, const OperatorParams& params) {
  Field out = bessel_power(u, 2.0 * params.s);
  const auto vsq = axis_points_sq(u.grid);
  detail::for_each_radius_sq(u.grid, vsq, [&](std::size_t flat, double r2) {
    const double w_gamma = detail::half_power_log1p(r2, params.gamma);
    const double w_2s = detail::half_power_log1p(r2, 2.0 * params.s);
    out.values[flat] = w_gamma * (out.values[flat] + w_2s * u.values[flat]);
  });
  return out;
}

Field commutator_bessel_weight(const Field& u, double r, double m) {
  Field weighted = u;
  const auto vsq = axis_points_sq(u.grid);
  detail::for_each_radius_sq(u.grid, vsq, [&](std::size_t flat, double r2) {
    weighted.values[flat] *= detail::half_power_log1p(r2, m);
  });
  Field lhs = bessel_power(weighted, r);
  Field rhs = bessel_power(u, r);
  detail::for_each_radius_sq(u.grid, vsq, [&](std::size_t flat, double r2) {
    lhs.values[flat] -= detail::half_power_log1p(r2, m) * rhs.values[flat];
  });
  return lhs;
}

double symbol_bound(const OperatorParams& params, const GridSpec& grid) {
  const double corner_vsq = grid.dim * grid.half_width * grid.half_width;
  const auto max_weight = [&](double m) {
    return m > 0.0 ? detail::half_power_log1p(corner_vsq, m) : 1.0;
  };
  const double bessel_max = detail::half_power_log1p(grid.max_frequency_sq(), 2.0 * params.s);
  return max_weight(params.gamma) * (bessel_max + max_weight(2.0 * params.s));
}

}  // namespace kfp
