#include "kfp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace kfp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <typename... Args>
std::string format_label(const char* fmt, Args... args) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

Field gaussian_member(const GridSpec& grid, double sigma, double shift0) {
  Field u = make_field(grid);
  const auto pts = axis_points(grid);
  const auto n = static_cast<std::size_t>(grid.n_per_axis);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  std::array<int, kMaxDim> idx{};
  for (std::size_t flat = 0; flat < grid.total_points(); ++flat) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      double x = pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      if (a == 0) x -= shift0;
      r2 += x * x;
    }
    u.values[flat] = std::exp(-r2 * inv2s2);
    for (int a = grid.dim - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < static_cast<int>(n)) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  return u;
}

Field band_limited_member(const GridSpec& grid, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  SpectralField c = make_spectral_field(grid);
  const auto n = static_cast<std::size_t>(grid.n_per_axis);

  const auto in_band = [&](std::size_t flat) {
    for (int a = 0; a < grid.dim; ++a) {
      const int i = static_cast<int>(flat % n);
      flat /= n;
      const int k = grid.wavenumber(i);
      if (std::abs(k) > band) return false;
    }
    return true;
  };
  const auto mirror_of = [&](std::size_t flat) {
    std::size_t m = 0;
    std::size_t stride = 1;
    std::array<std::size_t, kMaxDim> digits{};
    for (int a = grid.dim - 1; a >= 0; --a) {
      digits[static_cast<std::size_t>(a)] = flat % n;
      flat /= n;
    }
    for (int a = grid.dim - 1; a >= 0; --a) {
      m += ((n - digits[static_cast<std::size_t>(a)]) % n) * stride;
      stride *= n;
    }
    return m;
  };

  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    if (!in_band(i)) continue;
    const std::size_t m = mirror_of(i);
    if (m < i) continue;
    const double amp = 0.5 + 0.5 * unit();
    const double theta = 2.0 * std::numbers::pi * unit();
    if (m == i) {
      c.coefficients[i] = amp * (theta < std::numbers::pi ? 1.0 : -1.0);
    } else {
      const Complex phase(std::cos(theta), std::sin(theta));
      c.coefficients[i] = amp * phase;
      c.coefficients[m] = amp * std::conj(phase);
    }
  }
  return to_physical(c);
}

double boundary_spectral_ratio(const Field& u) {
  SpectralField c = to_spectral(u);
  double peak = 0.0, boundary = 0.0;
  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    const double a = std::abs(c.coefficients[i]);
    peak = std::max(peak, a);
    if (on_frequency_boundary(c.grid, i)) boundary = std::max(boundary, a);
  }
  return peak > 0.0 ? boundary / peak : 0.0;
}

struct SpreadFit {
  double fitted = 0.0;
  double ratio = 1.0;
  bool finite = true;
};

SpreadFit spread_over(const std::vector<double>& ratios) {
  SpreadFit s;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double r : ratios) {
    if (!std::isfinite(r)) s.finite = false;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  s.fitted = hi;
  if (hi == 0.0) {
    s.ratio = 1.0;  // identically zero family (e.g. m = 0): vacuously stable
  } else if (lo > 0.0) {
    s.ratio = hi / lo;
  } else {
    s.ratio = std::numeric_limits<double>::infinity();
  }
  return s;
}

// ln of trapezoid integral of exp(log_values) over times, all in log space.
double log_trapezoid(const std::vector<double>& times, const std::vector<double>& log_values) {
  detail::LogSumExp acc;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double dt = times[i + 1] - times[i];
    if (dt <= 0.0) continue;
    const double lw = std::log(0.5 * dt);
    acc.add(lw + log_values[i]);
    acc.add(lw + log_values[i + 1]);
  }
  return acc.value();
}

}  // namespace

TestFamily make_test_family(const GridSpec& grid) {
  TestFamily family;
  for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
    family.members.push_back(gaussian_member(grid, sigma, 0.0));
    family.labels.push_back(format_label("gaussian sigma=%g", sigma));
  }
  family.members.push_back(gaussian_member(grid, 1.0, grid.half_width / 4.0));
  family.labels.push_back("gaussian shifted L/4");
  const int band = std::max(1, grid.n_per_axis / 8);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    family.members.push_back(band_limited_member(grid, band, seed));
    family.labels.push_back(format_label("band-limited seed=%g", static_cast<double>(seed)));
  }
  // The narrowest Gaussian decides whether this grid resolves the family.
  family.resolution_ok = boundary_spectral_ratio(family.members.front()) < 1e-6;
  return family;
}

CheckResult check_commutator(const TestFamily& family, double r, double m, double spread_max) {
  if (!(r > 0.0)) throw std::invalid_argument("check_commutator: r must be positive");
  CheckResult res;
  res.name = format_label("commutator-bessel-weight r=%g m=%g", r, m);
  res.threshold = spread_max;
  res.low_confidence = !family.resolution_ok;

  const double denom_order = std::max(r - 1.0, 0.0);
  std::vector<double> ratios;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const Field& u = family.members[i];
    const double num = l2_norm(commutator_bessel_weight(u, r, m));
    const double den = weighted_sobolev(u, denom_order, m);
    if (den == 0.0) throw std::invalid_argument("check_commutator: degenerate family member");
    const double rho = num / den;
    ratios.push_back(rho);
    res.details.push_back({family.labels[i], rho, den});
  }
  const SpreadFit s = spread_over(ratios);
  res.fitted_constant = s.fitted;
  res.stability_ratio = s.ratio;
  res.pass = s.finite && std::isfinite(s.ratio) && s.ratio <= spread_max;
  return res;
}

CheckResult check_interpolation_eps(const TestFamily& family, double k, double l, double delta,
                                    std::span<const double> eps_list) {
  if (!(k > 0.0) || !(l > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("check_interpolation_eps: k, l, delta must be positive");
  CheckResult res;
  res.name = format_label("interpolation-eps k=%g l=%g delta=%g", k, l, delta);
  res.threshold = 0.0;
  res.low_confidence = !family.resolution_ok;

  bool all_finite = true;
  double worst = 0.0;
  for (double eps : eps_list) {
    double c_eps = 0.0;
    for (const Field& u : family.members) {
      const double base = l2_norm(u);
      const double lhs = weighted_sobolev(u, k, l);
      const double rhs = weighted_sobolev(u, k + delta, l);
      const double numer = std::max(lhs - eps * rhs, 0.0);
      c_eps = std::max(c_eps, numer / base);
    }
    if (!std::isfinite(c_eps)) all_finite = false;
    worst = std::max(worst, c_eps);
    res.details.push_back({format_label("eps=%g", eps), c_eps, 0.0});
  }
  res.fitted_constant = worst;
  res.stability_ratio = 1.0;
  res.pass = all_finite;
  return res;
}

CheckResult check_interpolation_product(const TestFamily& family, double k, double l, double delta,
                                        double spread_max) {
  if (!(delta > 0.0)) throw std::invalid_argument("check_interpolation_product: delta must be positive");
  CheckResult res;
  res.name = format_label("interpolation-product k=%g l=%g delta=%g", k, l, delta);
  res.threshold = spread_max;
  res.low_confidence = !family.resolution_ok;

  std::vector<double> ratios;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const Field& u = family.members[i];
    const double lhs = weighted_sobolev(u, k, l);
    const double hi = weighted_sobolev(u, k + delta, 2.0 * l);
    const double lo = weighted_sobolev(u, k - delta, 0.0);
    const double den = hi * lo;
    if (den == 0.0) throw std::invalid_argument("check_interpolation_product: degenerate member");
    const double rho = lhs * lhs / den;
    ratios.push_back(rho);
    res.details.push_back({family.labels[i], rho, den});
  }
  const SpreadFit s = spread_over(ratios);
  res.fitted_constant = s.fitted;
  res.stability_ratio = s.ratio;
  res.pass = s.finite && std::isfinite(s.ratio) && s.ratio <= spread_max;
  return res;
}

CheckResult check_energy(const Trajectory& trajectory, const OperatorParams& params,
                         EnergyThreshold mode, const SourceSpec& source, double c_max) {
  (void)params;
  CheckResult res;
  res.name = "energy-estimate";
  res.threshold = mode == EnergyThreshold::exponential_envelope
                      ? c_max
                      : std::numeric_limits<double>::infinity();
  if (trajectory.samples.empty()) throw std::invalid_argument("check_energy: empty trajectory");

  const double u0_l2 = trajectory.samples.front().report.l2;
  const double u0_sq = u0_l2 * u0_l2;
  bool finite = true;
  bool all_zero = true;
  double b0 = 0.0;
  double fitted_c = 0.0;
  double f_integral = 0.0;  // 2 int_0^t ||f||^2, trapezoid on the sample grid
  double f_prev = 0.0;
  if (!source.is_zero()) {
    const Field f0 = source_field(source, trajectory.samples.front().state.grid, 0.0);
    const double n = l2_norm(f0);
    f_prev = n * n;
  }
  double t_prev = 0.0;

  for (const TrajectorySample& s : trajectory.samples) {
    const double e = s.report.l2 * s.report.l2 + s.dissipation_h + s.dissipation_w;
    if (!std::isfinite(e)) finite = false;
    if (e != 0.0) all_zero = false;
    b0 = std::max(b0, e);

    if (!source.is_zero()) {
      const Field f = source_field(source, s.state.grid, s.t);
      const double n = l2_norm(f);
      const double f_cur = n * n;
      f_integral += (s.t - t_prev) * (f_prev + f_cur);  // carries the factor 2
      f_prev = f_cur;
      t_prev = s.t;
    }
    if (s.t > 0.0) {
      const double base = u0_sq + f_integral;
      if (base > 0.0 && e > 0.0) {
        const double c = (std::log(e) - std::log(base)) / s.t;
        fitted_c = std::max(fitted_c, c);
      }
    }
    res.details.push_back({format_label("t=%.6g", s.t), e, s.energy_residual});
  }

  res.fitted_constant = b0;
  res.stability_ratio = fitted_c;
  res.vacuous = all_zero;
  res.pass = finite &&
             (mode == EnergyThreshold::finite_only || fitted_c <= c_max);
  res.note = "stability_ratio carries the fitted exponential rate c";
  return res;
}

namespace {

CheckResult gevrey_check_common(const Trajectory& trajectory, const OperatorParams& params,
                                int k_max, const GevreyCheckOptions& opts, bool frequency_side) {
  if (!(params.s > 0.0) || params.s >= 1.0)
    throw std::invalid_argument("gevrey check: requires 0 < s < 1");
  if (trajectory.samples.empty()) throw std::invalid_argument("gevrey check: empty trajectory");
  if (k_max < 1) throw std::invalid_argument("gevrey check: k_max must be >= 1");

  CheckResult res;
  res.name = frequency_side ? "gevrey-frequency" : "gevrey-weight";
  res.threshold = opts.threshold;

  const double step = frequency_side
                          ? (opts.step_override > 0.0 ? opts.step_override : 2.0 * params.s_tilde())
                          : params.weight_exponent();
  const bool standard_step = frequency_side && opts.step_override == 0.0;
  const GridSpec& grid = trajectory.samples.front().state.grid;
  const double log_box_bracket =
      0.5 * std::log1p(grid.dim * grid.half_width * grid.half_width);

  bool any_used = false;
  bool all_pass = true;
  bool all_vacuous = true;
  double fitted = 0.0;
  double worst_ratio = 1.0;

  // Aggregate envelope terms, per k: sup_t of the squared ladder value and
  // trapezoid integrals of the two squared mixed norms.
  const auto kk = static_cast<std::size_t>(k_max) + 1;
  std::vector<double> sup_term(kk, kNegInf);
  std::vector<std::vector<double>> log_mixed_h(kk), log_mixed_w(kk);
  std::vector<double> times;

  for (const TrajectorySample& s : trajectory.samples) {
    SpectralField spectrum;
    if (frequency_side) spectrum = to_spectral(s.state);

    std::vector<double> ladder;
    int k_rel = k_max;
    if (frequency_side) {
      if (standard_step && s.report.log_a.size() >= kk) {
        ladder = s.report.log_a;
        k_rel = s.report.k_reliable_a;
      } else {
        ladder = log_bessel_ladder(spectrum, step, k_max);
        k_rel = reliable_k(spectrum, step, k_max);
      }
    } else {
      if (s.report.log_b.size() >= kk) {
        ladder = s.report.log_b;
      } else {
        ladder = log_weight_ladder(s.state, step, k_max);
      }
    }

    // Aggregate terms use every sample, including t < t_min.
    times.push_back(s.t);
    const double log_t = s.t > 0.0 ? std::log(s.t) : kNegInf;
    for (int k = 0; k <= k_max; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const double lt = k == 0 ? 0.0 : k * log_t;
      if (ladder[ku] != kNegInf && (k == 0 || s.t > 0.0))
        sup_term[ku] = std::max(sup_term[ku], 2.0 * (lt + ladder[ku]));

      Field g;
      if (frequency_side) {
        g = to_physical(bessel_power(spectrum, step * k));
      } else {
        g = s.state;
        const auto vsq = axis_points_sq(grid);
        detail::for_each_radius_sq(grid, vsq, [&](std::size_t flat, double r2) {
          g.values[flat] *= detail::half_power_log1p(r2, step * k);
        });
      }
      const double nh = weighted_sobolev(g, params.s, params.gamma / 2.0);
      const double nw = weighted_l2(g, params.weight_exponent());
      const double lh = nh > 0.0 ? 2.0 * (lt + std::log(nh)) : kNegInf;
      const double lw = nw > 0.0 ? 2.0 * (lt + std::log(nw)) : kNegInf;
      log_mixed_h[ku].push_back(k == 0 || s.t > 0.0 ? lh : kNegInf);
      log_mixed_w[ku].push_back(k == 0 || s.t > 0.0 ? lw : kNegInf);
    }

    if (s.t < opts.t_min) continue;
    any_used = true;
    GevreyFit fit = fit_gevrey(ladder, s.t, k_max, opts.threshold,
                               frequency_side ? k_rel : k_max);
    if (!fit.pass) all_pass = false;
    if (!fit.vacuous) all_vacuous = false;
    fitted = std::max(fitted, fit.fitted_c);
    worst_ratio = std::max(worst_ratio, fit.stability_ratio);
    res.details.push_back({format_label("t=%.6g", s.t), fit.fitted_c, fit.stability_ratio});
    res.details.push_back({format_label("k_fit at t=%.6g", s.t), static_cast<double>(fit.k_fit),
                           fit.vacuous ? 1.0 : 0.0});

    if (!frequency_side && !fit.vacuous) {
      // Truncation ceiling: b_k can never exceed <L sqrt(d)>^{step k} ||u||.
      const double log_u = std::log(s.report.l2);
      for (int k = 1; k <= fit.k_fit; ++k) {
        const double ceiling = step * k * log_box_bracket + log_u;
        if (ladder[static_cast<std::size_t>(k)] >= ceiling - std::numbers::ln2)
          res.truncation_limited = true;
      }
    }
  }

  // Envelope constant from the aggregate: (B^{k+1} k!)^2 >= Q_k.
  double envelope_b = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    detail::LogSumExp acc;
    acc.add(sup_term[ku]);
    acc.add(log_trapezoid(times, log_mixed_h[ku]));
    acc.add(log_trapezoid(times, log_mixed_w[ku]));
    const double log_q = acc.value();
    if (log_q == kNegInf) continue;
    const double log_b = (0.5 * log_q - std::lgamma(k + 1.0)) / (k + 1);
    envelope_b = std::max(envelope_b, std::exp(log_b));
    res.details.push_back({format_label("envelope k=%g", static_cast<double>(k)),
                           std::exp(log_b), 0.0});
  }
  res.note = format_label("aggregate envelope constant %.12g", envelope_b);

  res.fitted_constant = fitted;
  res.stability_ratio = worst_ratio;
  res.vacuous = all_vacuous && any_used;
  res.pass = any_used && all_pass && (frequency_side || !res.truncation_limited);
  if (!any_used) res.note = "no samples at or past t_min";
  return res;
}

}  // namespace

CheckResult check_gevrey_frequency(const Trajectory& trajectory, const OperatorParams& params,
                                   int k_max, const GevreyCheckOptions& opts) {
  return gevrey_check_common(trajectory, params, k_max, opts, true);
}

CheckResult check_gevrey_weight(const Trajectory& trajectory, const OperatorParams& params,
                                int k_max, const GevreyCheckOptions& opts) {
  return gevrey_check_common(trajectory, params, k_max, opts, false);
}

}  // namespace kfp
