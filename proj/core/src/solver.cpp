#include "kfp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kfp/errors.hpp"

namespace kfp {

namespace {

Field rhs_minus_kfp(const Field& u, double t, const OperatorParams& params,
                    const SourceSpec& source) {
  Field out = apply_kfp(u, params);
  for (auto& z : out.values) z = -z;
  if (!source.is_zero()) {
    Field f = source_field(source, u.grid, t);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += f.values[i];
  }
  return out;
}

void axpy(Field& y, double a, const Field& x) {
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
}

bool finite(const Field& u) {
  for (const Complex& z : u.values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double median_bracket(const GridSpec& grid) {
  std::vector<double> vals;
  vals.reserve(grid.total_points());
  const auto vsq = axis_points_sq(grid);
  detail::for_each_radius_sq(grid, vsq,
                             [&](std::size_t, double r2) { vals.push_back(std::sqrt(1.0 + r2)); });
  std::sort(vals.begin(), vals.end());
  return vals[vals.size() / 2];
}

}  // namespace

Field source_field(const SourceSpec& source, const GridSpec& grid, double t) {
  Field f = make_field(grid);
  if (source.is_zero()) return f;
  if (!(source.width > 0.0)) throw std::invalid_argument("source: width must be positive");
  const double front = source.amplitude * std::exp(-source.time_decay * t);
  const double inv2w2 = 1.0 / (2.0 * source.width * source.width);
  const auto vsq = axis_points_sq(grid);
  detail::for_each_radius_sq(
      grid, vsq, [&](std::size_t flat, double r2) { f.values[flat] = front * std::exp(-r2 * inv2w2); });
  return f;
}

std::vector<double> default_sample_times(double t_end, int count, double decades) {
  if (!(t_end > 0.0) || count < 1) throw std::invalid_argument("sample times: bad arguments");
  std::vector<double> times(static_cast<std::size_t>(count));
  if (count == 1) {
    times[0] = t_end;
    return times;
  }
  for (int i = 0; i < count; ++i) {
    const double frac = static_cast<double>(count - 1 - i) / (count - 1);
    times[static_cast<std::size_t>(i)] = t_end * std::pow(10.0, -decades * frac);
  }
  times.back() = t_end;
  return times;
}

Field make_initial_data(const InitialDataSpec& spec, const GridSpec& grid) {
  if (spec.kind == InitialDataSpec::Kind::gaussian) {
    if (!(spec.width > 0.0)) throw std::invalid_argument("initial: width must be positive");
    Field u = make_field(grid);
    const double inv2w2 = 1.0 / (2.0 * spec.width * spec.width);
    const auto vsq = axis_points_sq(grid);
    detail::for_each_radius_sq(grid, vsq, [&](std::size_t flat, double r2) {
      u.values[flat] = spec.amplitude * std::exp(-r2 * inv2w2);
    });
    return u;
  }

  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("initial: epsilon must be positive");
  // Deterministic phase stream: one draw per canonical mode, visited in
  // ascending flat order, independent of the standard library's
  // distribution implementation.
  std::mt19937_64 rng(spec.seed);
  const auto uniform_angle = [&rng]() {
    return 2.0 * std::numbers::pi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  SpectralField c = make_spectral_field(grid);
  const auto n = static_cast<std::size_t>(grid.n_per_axis);
  const auto mirror_of = [&](std::size_t flat) {
    std::size_t m = 0;
    std::size_t stride = 1;
    std::array<std::size_t, kMaxDim> digits{};
    for (int a = grid.dim - 1; a >= 0; --a) {
      digits[static_cast<std::size_t>(a)] = flat % n;
      flat /= n;
    }
    for (int a = grid.dim - 1; a >= 0; --a) {
      const std::size_t i = digits[static_cast<std::size_t>(a)];
      m += ((n - i) % n) * stride;
      stride *= n;
    }
    return m;
  };

  const double profile_exponent = -(grid.dim / 2.0 + spec.epsilon) / 2.0;
  const auto xisq = axis_frequencies_sq(grid);
  std::vector<double> amplitude(grid.total_points());
  detail::for_each_radius_sq(grid, xisq, [&](std::size_t flat, double r2) {
    amplitude[flat] = detail::half_power_log1p(r2, profile_exponent);
  });

  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    const std::size_t m = mirror_of(i);
    if (m < i) continue;
    const double theta = uniform_angle();
    if (m == i) {
      c.coefficients[i] = amplitude[i] * (theta < std::numbers::pi ? 1.0 : -1.0);
    } else {
      const Complex phase(std::cos(theta), std::sin(theta));
      c.coefficients[i] = amplitude[i] * phase;
      c.coefficients[m] = amplitude[m] * std::conj(phase);
    }
  }

  Field u = to_physical(c);
  for (auto& z : u.values) z = Complex(z.real(), 0.0);
  const double norm = l2_norm(u);
  if (!(norm > 0.0)) throw std::invalid_argument("initial: degenerate rough profile");
  for (auto& z : u.values) z /= norm;
  return u;
}

double stability_dt(const OperatorParams& params, const GridSpec& grid) {
  return 1.25 / symbol_bound(params, grid);
}

Field step_rk4(const Field& u, double t, double dt, const OperatorParams& params,
               const SourceSpec& source) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  Field k1 = rhs_minus_kfp(u, t, params, source);
  Field stage = u;
  axpy(stage, 0.5 * dt, k1);
  Field k2 = rhs_minus_kfp(stage, t + 0.5 * dt, params, source);
  stage = u;
  axpy(stage, 0.5 * dt, k2);
  Field k3 = rhs_minus_kfp(stage, t + 0.5 * dt, params, source);
  stage = u;
  axpy(stage, dt, k3);
  Field k4 = rhs_minus_kfp(stage, t + dt, params, source);

  Field out = u;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += w * (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i]);
  return out;
}

Field step_backward_euler(const Field& u, double t, double dt, const OperatorParams& params,
                          const SourceSpec& source, double tol, int max_iter) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const GridSpec& grid = u.grid;
  const std::size_t total = grid.total_points();

  // Diagonal symmetrization: with W = diag<v>^gamma, B the Bessel
  // multiplier and Q = diag<v>^{2s},
  //   I + dt A = W^{1/2} (I + dt W^{1/2}(B+Q)W^{1/2}) W^{-1/2},
  // so CG runs on the Hermitian positive definite middle factor and the
  // true residual is recovered exactly through the same diagonal.
  std::vector<double> w_half(total), w_half_inv(total), q(total);
  const auto vsq = axis_points_sq(grid);
  detail::for_each_radius_sq(grid, vsq, [&](std::size_t flat, double r2) {
    const double wh = detail::half_power_log1p(r2, 0.5 * params.gamma);
    w_half[flat] = wh;
    w_half_inv[flat] = 1.0 / wh;
    q[flat] = detail::half_power_log1p(r2, 2.0 * params.s);
  });

  Field b = u;
  if (!source.is_zero()) {
    Field f = source_field(source, grid, t + dt);
    axpy(b, dt, f);
  }
  const double b_norm = l2_norm(b);
  if (b_norm == 0.0) return make_field(grid);

  const auto apply_sym = [&](const Field& x) {
    Field y = x;
    for (std::size_t i = 0; i < total; ++i) y.values[i] *= w_half[i];
    Field by = bessel_power(y, 2.0 * params.s);
    for (std::size_t i = 0; i < total; ++i)
      by.values[i] = x.values[i] + dt * w_half[i] * (by.values[i] + q[i] * y.values[i]);
    return by;
  };

  const double m_ref = median_bracket(grid);
  const double w_ref = std::pow(m_ref, params.gamma);
  const double q_ref = std::pow(m_ref, 2.0 * params.s);
  const auto apply_precond = [&](const Field& r) {
    SpectralField c = to_spectral(r);
    const auto xisq = axis_frequencies_sq(grid);
    detail::for_each_radius_sq(grid, xisq, [&](std::size_t flat, double r2) {
      const double sym = 1.0 + dt * w_ref * (detail::half_power_log1p(r2, 2.0 * params.s) + q_ref);
      c.coefficients[flat] /= sym;
    });
    return to_physical(c);
  };

  const auto dot_re = [&](const Field& a, const Field& bb) {
    double sum = 0.0;
    for (std::size_t i = 0; i < total; ++i)
      sum += a.values[i].real() * bb.values[i].real() + a.values[i].imag() * bb.values[i].imag();
    return sum;
  };
  const auto true_residual = [&](const Field& r_tilde) {
    double sum = 0.0;
    for (std::size_t i = 0; i < total; ++i) sum += std::norm(w_half[i] * r_tilde.values[i]);
    return std::sqrt(sum * std::pow(grid.spacing(), grid.dim));
  };

  Field x = make_field(grid);
  Field r = b;
  for (std::size_t i = 0; i < total; ++i) r.values[i] *= w_half_inv[i];  // b_tilde
  double rel = true_residual(r) / b_norm;
  if (rel <= tol) return x;

  Field z = apply_precond(r);
  Field p = z;
  double rho = dot_re(r, z);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Field mp = apply_sym(p);
    const double alpha = rho / dot_re(p, mp);
    for (std::size_t i = 0; i < total; ++i) {
      x.values[i] += alpha * p.values[i];
      r.values[i] -= alpha * mp.values[i];
    }
    rel = true_residual(r) / b_norm;
    if (rel <= tol) break;
    z = apply_precond(r);
    const double rho_next = dot_re(r, z);
    const double beta = rho_next / rho;
    rho = rho_next;
    for (std::size_t i = 0; i < total; ++i) p.values[i] = z.values[i] + beta * p.values[i];
  }
  if (rel > tol) throw KrylovFailure(rel, iter);

  for (std::size_t i = 0; i < total; ++i) x.values[i] *= w_half[i];
  return x;
}

namespace {

double energy_flux(const Field& u, double t, const OperatorParams& params,
                   const SourceSpec& source) {
  const double quad = inner_product(apply_kfp(u, params), u).real();
  double src = 0.0;
  if (!source.is_zero()) src = inner_product(source_field(source, u.grid, t), u).real();
  return -2.0 * quad + 2.0 * src;
}

}  // namespace

Trajectory evolve(const Field& u0, const SolverConfig& config, const OperatorParams& params,
                  const SourceSpec& source, int k_max) {
  if (!(config.t_end > 0.0)) throw std::invalid_argument("evolve: t_end must be positive");
  std::vector<double> samples = config.sample_times;
  if (samples.empty()) samples = default_sample_times(config.t_end);
  if (!std::is_sorted(samples.begin(), samples.end()))
    throw std::invalid_argument("evolve: sample times must be sorted");
  if (samples.front() <= 0.0 || samples.back() > config.t_end)
    throw std::invalid_argument("evolve: sample times must lie in (0, t_end]");
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  if (samples.back() < config.t_end) samples.push_back(config.t_end);

  const double dt = config.dt_auto ? stability_dt(params, u0.grid) : config.dt;
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  const bool rk4 = config.method == SolverConfig::Method::rk4;

  const auto advance = [&](const Field& u, double t, double h) {
    return rk4 ? step_rk4(u, t, h, params, source)
               : step_backward_euler(u, t, h, params, source, config.krylov_tol,
                                     config.krylov_max_iter);
  };
  const auto g_h = [&](const Field& u) {
    const double g = weighted_sobolev(u, params.s, params.gamma / 2.0);
    return g * g;
  };
  const auto g_w = [&](const Field& u) {
    const double g = weighted_l2(u, params.weight_exponent());
    return g * g;
  };

  Trajectory traj;
  traj.dt_used = dt;
  Field u = u0;
  double t = 0.0;
  double diss_h = 0.0, diss_w = 0.0;
  double gh_prev = g_h(u), gw_prev = g_w(u);

  const auto record = [&](double at) {
    TrajectorySample s;
    s.t = at;
    s.state = u;
    s.report = norm_report(u, at, params, k_max);
    s.dissipation_h = diss_h;
    s.dissipation_w = diss_w;
    s.quad_form = inner_product(apply_kfp(u, params), u).real();
    if (rk4) {
      Field full = step_rk4(u, at, dt, params, source);
      Field half = step_rk4(u, at, 0.5 * dt, params, source);
      const double drop = (l2_norm(full) * l2_norm(full) - l2_norm(u) * l2_norm(u)) / dt;
      const double simpson = (energy_flux(u, at, params, source) +
                              4.0 * energy_flux(half, at + 0.5 * dt, params, source) +
                              energy_flux(full, at + dt, params, source)) /
                             6.0;
      s.energy_residual = std::abs(drop - simpson);
    } else {
      s.energy_residual = std::numeric_limits<double>::quiet_NaN();
    }
    traj.samples.push_back(std::move(s));
  };

  record(0.0);

  for (double target : samples) {
    while (t < target) {
      double h = std::min(dt, target - t);
      if (target - t - h < 1e-9 * dt) h = target - t;
      u = advance(u, t, h);
      ++traj.steps_taken;
      if (!finite(u)) throw SolverAbort(traj.steps_taken, t + h, "non-finite state");
      const double gh = g_h(u), gw = g_w(u);
      diss_h += 0.5 * h * (gh_prev + gh);
      diss_w += 0.5 * h * (gw_prev + gw);
      gh_prev = gh;
      gw_prev = gw;
      t = (target - t <= h) ? target : t + h;
    }
    t = target;
    record(target);
  }
  return traj;
}

Trajectory evolve(const InitialDataSpec& u0spec, const GridSpec& grid, const SolverConfig& config,
                  const OperatorParams& params, const SourceSpec& source, int k_max) {
  return evolve(make_initial_data(u0spec, grid), config, params, source, k_max);
}

}  // namespace kfp
