#include "kfp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kfp {

namespace detail {

void LogSumExp::add(double log_term) {
  if (log_term == -std::numeric_limits<double>::infinity()) return;
  if (log_term <= max_) {
    scaled_sum_ += std::exp(log_term - max_);
    return;
  }
  scaled_sum_ = scaled_sum_ * std::exp(max_ - log_term) + 1.0;
  max_ = log_term;
}

double LogSumExp::value() const {
  if (max_ == -std::numeric_limits<double>::infinity()) return max_;
  return max_ + std::log(scaled_sum_);
}

}  // namespace detail

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double weighted_l2(const Field& u, double m) {
  double sum = 0.0;
  const auto vsq = axis_points_sq(u.grid);
  detail::for_each_radius_sq(u.grid, vsq, [&](std::size_t flat, double r2) {
    const double w = detail::half_power_log1p(r2, m);
    sum += w * w * std::norm(u.values[flat]);
  });
  return std::sqrt(sum * std::pow(u.grid.spacing(), u.grid.dim));
}

double weighted_sobolev(const Field& u, double order, double m) {
  Field weighted = u;
  const auto vsq = axis_points_sq(u.grid);
  detail::for_each_radius_sq(u.grid, vsq, [&](std::size_t flat, double r2) {
    weighted.values[flat] *= detail::half_power_log1p(r2, m);
  });
  SpectralField c = bessel_power(to_spectral(weighted), order);
  return spectral_l2_norm(c);
}

std::vector<double> log_bessel_ladder(const SpectralField& c, double step, int k_max) {
  const std::size_t total = c.grid.total_points();
  std::vector<double> log_sym(total), log_sq(total);
  const auto xisq = axis_frequencies_sq(c.grid);
  detail::for_each_radius_sq(c.grid, xisq, [&](std::size_t flat, double r2) {
    log_sym[flat] = std::log1p(r2);
    const double a = std::abs(c.coefficients[flat]);
    log_sq[flat] = a > 0.0 ? 2.0 * std::log(a) : kNegInf;
  });
  const double box_term = c.grid.dim * std::log(2.0 * c.grid.half_width);
  std::vector<double> ladder(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    detail::LogSumExp acc;
    for (std::size_t i = 0; i < total; ++i) {
      if (log_sq[i] == kNegInf) continue;
      acc.add(step * k * log_sym[i] + log_sq[i]);
    }
    const double v = acc.value();
    ladder[static_cast<std::size_t>(k)] = v == kNegInf ? kNegInf : 0.5 * (v + box_term);
  }
  return ladder;
}

std::vector<double> log_weight_ladder(const Field& u, double step, int k_max) {
  const std::size_t total = u.grid.total_points();
  std::vector<double> log_w(total), log_sq(total);
  const auto vsq = axis_points_sq(u.grid);
  detail::for_each_radius_sq(u.grid, vsq, [&](std::size_t flat, double r2) {
    log_w[flat] = std::log1p(r2);
    const double a = std::abs(u.values[flat]);
    log_sq[flat] = a > 0.0 ? 2.0 * std::log(a) : kNegInf;
  });
  const double cell_term = u.grid.dim * std::log(u.grid.spacing());
  std::vector<double> ladder(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    detail::LogSumExp acc;
    for (std::size_t i = 0; i < total; ++i) {
      if (log_sq[i] == kNegInf) continue;
      acc.add(step * k * log_w[i] + log_sq[i]);
    }
    const double v = acc.value();
    ladder[static_cast<std::size_t>(k)] = v == kNegInf ? kNegInf : 0.5 * (v + cell_term);
  }
  return ladder;
}

int reliable_k(const SpectralField& c, double step, int k_max) {
  double peak = kNegInf;
  double floor = kNegInf;
  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    const double a = std::abs(c.coefficients[i]);
    const double la = a > 0.0 ? std::log(a) : kNegInf;
    if (la > peak) peak = la;
    if (on_frequency_boundary(c.grid, i) && la > floor) floor = la;
  }
  if (peak == kNegInf) return k_max;   // zero field: nothing to contaminate
  if (floor == kNegInf) return k_max;  // band-limited: boundary exactly zero
  const double per_k = 0.5 * step * std::log1p(c.grid.max_frequency_sq());
  if (per_k <= 0.0) return k_max;
  const double gap = peak - floor;
  const int k = static_cast<int>(std::floor(gap / per_k));
  return std::clamp(k, 1, k_max);
}

NormReport norm_report(const Field& u, double t, const OperatorParams& params, int k_max) {
  if (k_max < 1) throw std::invalid_argument("norm_report: k_max must be >= 1");
  NormReport rep;
  rep.t = t;
  rep.l2 = l2_norm(u);
  rep.h_s_gamma2 = weighted_sobolev(u, params.s, params.gamma / 2.0);
  rep.w_gamma2s = weighted_l2(u, params.weight_exponent());
  SpectralField c = to_spectral(u);
  rep.log_a = log_bessel_ladder(c, 2.0 * params.s_tilde(), k_max);
  rep.log_b = log_weight_ladder(u, params.weight_exponent(), k_max);
  rep.k_reliable_a = reliable_k(c, 2.0 * params.s_tilde(), k_max);
  rep.overflow_flag = std::isinf(rep.l2) || std::isinf(rep.h_s_gamma2) || std::isinf(rep.w_gamma2s);
  return rep;
}

GevreyFit fit_gevrey(std::span<const double> log_seq, double t, int k_max, double threshold,
                     int k_reliable) {
  if (!(t > 0.0)) throw std::invalid_argument("fit_gevrey: t must be positive");
  if (log_seq.size() < static_cast<std::size_t>(k_max) + 1)
    throw std::invalid_argument("fit_gevrey: sequence shorter than k_max + 1");
  GevreyFit fit;
  fit.k_fit = std::clamp(k_reliable, 1, k_max);
  fit.per_k_constant.assign(static_cast<std::size_t>(fit.k_fit) + 1, 0.0);
  fit.per_k_constant[0] = std::exp(log_seq[0]);

  bool all_zero = true;
  bool all_finite = true;
  const double log_t = std::log(t);
  for (int k = 1; k <= fit.k_fit; ++k) {
    const double ls = log_seq[static_cast<std::size_t>(k)];
    if (ls == kNegInf) {
      fit.per_k_constant[static_cast<std::size_t>(k)] = 0.0;
      continue;
    }
    all_zero = false;
    const double log_ck = (ls + k * log_t - std::lgamma(k + 1.0)) / k;
    const double ck = std::exp(log_ck);
    fit.per_k_constant[static_cast<std::size_t>(k)] = ck;
    if (!std::isfinite(ck)) all_finite = false;
  }

  if (all_zero) {
    fit.vacuous = true;
    fit.fitted_c = 0.0;
    fit.stability_ratio = 1.0;
    fit.pass = true;
    return fit;
  }

  double cmax = 0.0;
  for (int k = 1; k <= fit.k_fit; ++k) cmax = std::max(cmax, fit.per_k_constant[static_cast<std::size_t>(k)]);
  fit.fitted_c = cmax;

  if (fit.k_fit >= 2) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int k = 2; k <= fit.k_fit; ++k) {
      const double ck = fit.per_k_constant[static_cast<std::size_t>(k)];
      lo = std::min(lo, ck);
      hi = std::max(hi, ck);
    }
    fit.stability_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  } else {
    fit.stability_ratio = 1.0;
  }

  fit.pass = all_finite && std::isfinite(fit.stability_ratio) && fit.stability_ratio <= threshold;
  return fit;
}

}  // namespace kfp
