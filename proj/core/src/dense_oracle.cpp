#include "kfp/dense_oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kfp {

namespace {

constexpr std::size_t kDenseLimit = 4096;

void check_size(const GridSpec& grid) {
  if (grid.total_points() > kDenseLimit)
    throw std::invalid_argument("dense oracle: grid exceeds 4096 points");
}

std::array<int, kMaxDim> decode(const GridSpec& grid, std::size_t flat) {
  std::array<int, kMaxDim> digits{};
  const auto n = static_cast<std::size_t>(grid.n_per_axis);
  for (int a = grid.dim - 1; a >= 0; --a) {
    digits[static_cast<std::size_t>(a)] = static_cast<int>(flat % n);
    flat /= n;
  }
  return digits;
}

// Kernel of a Fourier multiplier on the periodic grid, as a function of the
// per-axis offset (j - l) mod N: a plain O(P^2) DFT sum, independent of the
// fast transform path.  The imaginary part vanishes by the symmetry of the
// symbol, so only the real part is kept.
std::vector<double> multiplier_kernel(const GridSpec& grid, const std::vector<double>& symbol) {
  const std::size_t total = grid.total_points();
  const int n = grid.n_per_axis;
  std::vector<double> cos_table(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q)
    cos_table[static_cast<std::size_t>(q)] = std::cos(2.0 * std::numbers::pi * q / n);

  std::vector<double> kernel(total);
  for (std::size_t off = 0; off < total; ++off) {
    const auto off_digits = decode(grid, off);
    double acc = 0.0;
    for (std::size_t mode = 0; mode < total; ++mode) {
      const auto mode_digits = decode(grid, mode);
      long phase = 0;
      for (int a = 0; a < grid.dim; ++a) {
        const int k = grid.wavenumber(mode_digits[static_cast<std::size_t>(a)]);
        phase += static_cast<long>(k) * off_digits[static_cast<std::size_t>(a)];
      }
      phase %= n;
      if (phase < 0) phase += n;
      acc += symbol[mode] * cos_table[static_cast<std::size_t>(phase)];
    }
    kernel[off] = acc / static_cast<double>(total);
  }
  return kernel;
}

std::vector<double> bessel_symbol(const GridSpec& grid, double r) {
  std::vector<double> symbol(grid.total_points());
  const auto xisq = axis_frequencies_sq(grid);
  detail::for_each_radius_sq(grid, xisq, [&](std::size_t flat, double r2) {
    symbol[flat] = detail::half_power_log1p(r2, r);
  });
  return symbol;
}

std::vector<double> bracket_samples(const GridSpec& grid, double m) {
  std::vector<double> w(grid.total_points());
  const auto vsq = axis_points_sq(grid);
  detail::for_each_radius_sq(grid, vsq, [&](std::size_t flat, double r2) {
    w[flat] = detail::half_power_log1p(r2, m);
  });
  return w;
}

std::size_t offset_index(const GridSpec& grid, std::size_t row, std::size_t col) {
  const auto n = static_cast<std::size_t>(grid.n_per_axis);
  const auto rd = decode(grid, row);
  const auto cd = decode(grid, col);
  std::size_t off = 0;
  for (int a = 0; a < grid.dim; ++a) {
    const auto r = static_cast<std::size_t>(rd[static_cast<std::size_t>(a)]);
    const auto c = static_cast<std::size_t>(cd[static_cast<std::size_t>(a)]);
    off = off * n + (r + n - c) % n;
  }
  return off;
}

// Real symmetric similarity transform of the generator:
//   S = W^{1/2} (B + Q) W^{1/2},  A = W^{1/2} S W^{-1/2},
// with W = diag<v>^gamma and Q = diag<v>^{2s}.
Eigen::MatrixXd symmetrized_generator(const OperatorParams& params, const GridSpec& grid) {
  const std::size_t total = grid.total_points();
  const auto kernel = multiplier_kernel(grid, bessel_symbol(grid, 2.0 * params.s));
  const auto w_half = bracket_samples(grid, 0.5 * params.gamma);
  const auto q = bracket_samples(grid, 2.0 * params.s);
  const auto w = bracket_samples(grid, params.gamma);

  Eigen::MatrixXd s(total, total);
  for (std::size_t row = 0; row < total; ++row)
    for (std::size_t col = 0; col < total; ++col)
      s(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          w_half[row] * kernel[offset_index(grid, row, col)] * w_half[col];
  for (std::size_t i = 0; i < total; ++i)
    s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += w[i] * q[i];
  return s;
}

}  // namespace

DenseMatrix dense_assemble(const OperatorParams& params, const GridSpec& grid) {
  check_size(grid);
  const std::size_t total = grid.total_points();
  const auto kernel = multiplier_kernel(grid, bessel_symbol(grid, 2.0 * params.s));
  const auto w = bracket_samples(grid, params.gamma);
  const auto q = bracket_samples(grid, 2.0 * params.s);

  DenseMatrix a;
  a.n = total;
  a.entries.resize(total * total);
  for (std::size_t row = 0; row < total; ++row) {
    for (std::size_t col = 0; col < total; ++col)
      a.at(row, col) = w[row] * kernel[offset_index(grid, row, col)];
    a.at(row, row) += w[row] * q[row];
  }
  return a;
}

DenseMatrix dense_assemble_commutator(const GridSpec& grid, double r, double m) {
  check_size(grid);
  const std::size_t total = grid.total_points();
  const auto kernel = multiplier_kernel(grid, bessel_symbol(grid, r));
  const auto w = bracket_samples(grid, m);

  DenseMatrix c;
  c.n = total;
  c.entries.resize(total * total);
  for (std::size_t row = 0; row < total; ++row)
    for (std::size_t col = 0; col < total; ++col)
      c.at(row, col) = kernel[offset_index(grid, row, col)] * (w[col] - w[row]);
  return c;
}

std::vector<Complex> dense_apply(const DenseMatrix& a, const std::vector<Complex>& x) {
  if (x.size() != a.n) throw std::invalid_argument("dense apply: size mismatch");
  std::vector<Complex> y(a.n, Complex(0.0, 0.0));
  for (std::size_t row = 0; row < a.n; ++row) {
    Complex acc(0.0, 0.0);
    for (std::size_t col = 0; col < a.n; ++col) acc += a.at(row, col) * x[col];
    y[row] = acc;
  }
  return y;
}

Field dense_expm_apply(const Field& u0, const OperatorParams& params, double t) {
  check_size(u0.grid);
  if (t < 0.0) throw std::invalid_argument("dense oracle: t must be nonnegative");
  const std::size_t total = u0.grid.total_points();
  const Eigen::MatrixXd s = symmetrized_generator(params, u0.grid);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) throw std::runtime_error("dense oracle: eigensolver failed");

  const auto w_half = bracket_samples(u0.grid, 0.5 * params.gamma);
  Eigen::VectorXd re(total), im(total);
  for (std::size_t i = 0; i < total; ++i) {
    re(static_cast<Eigen::Index>(i)) = u0.values[i].real() / w_half[i];
    im(static_cast<Eigen::Index>(i)) = u0.values[i].imag() / w_half[i];
  }
  const Eigen::VectorXd decay = (-t * eig.eigenvalues().array()).exp().matrix();
  const auto propagate = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd z = eig.eigenvectors().transpose() * x;
    z.array() *= decay.array();
    return Eigen::VectorXd(eig.eigenvectors() * z);
  };
  const Eigen::VectorXd out_re = propagate(re);
  const Eigen::VectorXd out_im = propagate(im);

  Field out = make_field(u0.grid);
  for (std::size_t i = 0; i < total; ++i)
    out.values[i] = w_half[i] * Complex(out_re(static_cast<Eigen::Index>(i)),
                                        out_im(static_cast<Eigen::Index>(i)));
  return out;
}

Field dense_expm_apply_pade(const Field& u0, const OperatorParams& params, double t) {
  check_size(u0.grid);
  if (t < 0.0) throw std::invalid_argument("dense oracle: t must be nonnegative");
  const std::size_t total = u0.grid.total_points();
  const DenseMatrix a = dense_assemble(params, u0.grid);
  Eigen::MatrixXcd m(total, total);
  for (std::size_t row = 0; row < total; ++row)
    for (std::size_t col = 0; col < total; ++col)
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = -t * a.at(row, col);
  const Eigen::MatrixXcd propagator = m.exp();

  Eigen::VectorXcd x(total);
  for (std::size_t i = 0; i < total; ++i) x(static_cast<Eigen::Index>(i)) = u0.values[i];
  const Eigen::VectorXcd y = propagator * x;
  Field out = make_field(u0.grid);
  for (std::size_t i = 0; i < total; ++i) out.values[i] = y(static_cast<Eigen::Index>(i));
  return out;
}

Field dense_backward_euler_solve(const Field& rhs, const OperatorParams& params, double dt) {
  check_size(rhs.grid);
  if (!(dt > 0.0)) throw std::invalid_argument("dense oracle: dt must be positive");
  const std::size_t total = rhs.grid.total_points();
  const DenseMatrix a = dense_assemble(params, rhs.grid);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(total, total);
  for (std::size_t row = 0; row < total; ++row)
    for (std::size_t col = 0; col < total; ++col)
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += dt * a.at(row, col);

  Eigen::VectorXcd b(total);
  for (std::size_t i = 0; i < total; ++i) b(static_cast<Eigen::Index>(i)) = rhs.values[i];
  const Eigen::VectorXcd x = m.partialPivLu().solve(b);
  Field out = make_field(rhs.grid);
  for (std::size_t i = 0; i < total; ++i) out.values[i] = x(static_cast<Eigen::Index>(i));
  return out;
}

double dense_operator_norm(const OperatorParams& params, const GridSpec& grid) {
  check_size(grid);
  const std::size_t total = grid.total_points();
  const DenseMatrix a = dense_assemble(params, grid);
  Eigen::MatrixXd m(total, total);
  for (std::size_t row = 0; row < total; ++row)
    for (std::size_t col = 0; col < total; ++col)
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = a.at(row, col).real();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace kfp
