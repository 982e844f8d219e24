#include "kfp/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace kfp {

std::size_t GridSpec::total_points() const {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n_per_axis);
  return total;
}

double GridSpec::freq_unit() const { return std::numbers::pi / half_width; }

double GridSpec::point(int axis_index) const { return -half_width + spacing() * axis_index; }

int GridSpec::wavenumber(int storage_index) const {
  return storage_index < n_per_axis / 2 ? storage_index : storage_index - n_per_axis;
}

double GridSpec::max_frequency_sq() const {
  const double edge = freq_unit() * (n_per_axis / 2);
  return dim * edge * edge;
}

GridSpec make_grid(int dim, double half_width, int n_per_axis) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("grid: half_width must be positive and finite");
  if (n_per_axis < 8) throw std::invalid_argument("grid: n_per_axis must be at least 8");
  if (n_per_axis % 2 != 0) throw std::invalid_argument("grid: n_per_axis must be even");
  return GridSpec{dim, half_width, n_per_axis};
}

Field make_field(const GridSpec& grid) { return Field{grid, std::vector<Complex>(grid.total_points())}; }

SpectralField make_spectral_field(const GridSpec& grid) {
  return SpectralField{grid, std::vector<Complex>(grid.total_points())};
}

std::vector<double> axis_points(const GridSpec& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.n_per_axis));
  for (int j = 0; j < grid.n_per_axis; ++j) v[static_cast<std::size_t>(j)] = grid.point(j);
  return v;
}

std::vector<double> axis_frequencies(const GridSpec& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.n_per_axis));
  for (int i = 0; i < grid.n_per_axis; ++i) v[static_cast<std::size_t>(i)] = grid.frequency(i);
  return v;
}

std::vector<double> axis_points_sq(const GridSpec& grid) {
  auto v = axis_points(grid);
  for (auto& x : v) x *= x;
  return v;
}

std::vector<double> axis_frequencies_sq(const GridSpec& grid) {
  auto v = axis_frequencies(grid);
  for (auto& x : v) x *= x;
  return v;
}

bool on_frequency_boundary(const GridSpec& grid, std::size_t flat) {
  const auto n = static_cast<std::size_t>(grid.n_per_axis);
  const int half = grid.n_per_axis / 2;
  for (int a = grid.dim - 1; a >= 0; --a) {
    const int i = static_cast<int>(flat % n);
    flat /= n;
    const int k = i < half ? i : i - grid.n_per_axis;
    if (std::abs(k) >= half - 1) return true;
  }
  return false;
}

bool on_spatial_boundary(const GridSpec& grid, std::size_t flat) {
  const auto n = static_cast<std::size_t>(grid.n_per_axis);
  for (int a = grid.dim - 1; a >= 0; --a) {
    const std::size_t i = flat % n;
    flat /= n;
    if (i == 0 || i + 1 == n) return true;
  }
  return false;
}

namespace {

// FFTW planning is not thread safe; executing a plan on fresh arrays is.
// Plans are cached per (dim, N, sign) and executed through the new-array
// interface on fftw_malloc'd scratch so concurrent transforms stay safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_plan(int dim, int n, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  const auto key = std::make_tuple(dim, n, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  auto* proto = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  if (proto == nullptr) throw std::bad_alloc();
  std::vector<int> dims(static_cast<std::size_t>(dim), n);
  fftw_plan plan = fftw_plan_dft(dim, dims.data(), proto, proto, sign, FFTW_ESTIMATE);
  fftw_free(proto);
  if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

struct FftwBuffer {
  fftw_complex* data = nullptr;
  explicit FftwBuffer(std::size_t count) {
    data = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Parity of the sum of per-axis storage indices; the sign (-1)^{sum k_a}
// that converts between DFT slots and the exp(i xi . v) basis on [-L, L)^d.
// N is even, so index parity and wavenumber parity agree.
double mode_sign(const GridSpec& grid, std::size_t flat) {
  const auto n = static_cast<std::size_t>(grid.n_per_axis);
  std::size_t sum = 0;
  for (int a = 0; a < grid.dim; ++a) {
    sum += flat % n;
    flat /= n;
  }
  return (sum & 1u) != 0 ? -1.0 : 1.0;
}

void run_plan(const GridSpec& grid, int sign, const std::vector<Complex>& in, std::vector<Complex>& out) {
  const std::size_t total = grid.total_points();
  fftw_plan plan = cached_plan(grid.dim, grid.n_per_axis, sign);
  FftwBuffer buf(total);
  for (std::size_t i = 0; i < total; ++i) {
    buf.data[i][0] = in[i].real();
    buf.data[i][1] = in[i].imag();
  }
  fftw_execute_dft(plan, buf.data, buf.data);
  out.resize(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = Complex(buf.data[i][0], buf.data[i][1]);
}

}  // namespace

SpectralField to_spectral(const Field& u) {
  if (u.values.size() != u.grid.total_points()) throw std::invalid_argument("to_spectral: size mismatch");
  SpectralField c;
  c.grid = u.grid;
  run_plan(u.grid, FFTW_FORWARD, u.values, c.coefficients);
  const double scale = 1.0 / static_cast<double>(u.grid.total_points());
  for (std::size_t i = 0; i < c.coefficients.size(); ++i)
    c.coefficients[i] *= scale * mode_sign(u.grid, i);
  return c;
}

Field to_physical(const SpectralField& c) {
  if (c.coefficients.size() != c.grid.total_points())
    throw std::invalid_argument("to_physical: size mismatch");
  std::vector<Complex> staged(c.coefficients.size());
  for (std::size_t i = 0; i < staged.size(); ++i) staged[i] = c.coefficients[i] * mode_sign(c.grid, i);
  Field u;
  u.grid = c.grid;
  run_plan(c.grid, FFTW_BACKWARD, staged, u.values);
  return u;
}

double l2_norm(const Field& u) {
  double sum = 0.0;
  for (const Complex& z : u.values) sum += std::norm(z);
  return std::sqrt(sum * std::pow(u.grid.spacing(), u.grid.dim));
}

Complex inner_product(const Field& u, const Field& w) {
  if (!(u.grid == w.grid)) throw std::invalid_argument("inner_product: grid mismatch");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) sum += u.values[i] * std::conj(w.values[i]);
  return sum * std::pow(u.grid.spacing(), u.grid.dim);
}

double spectral_l2_norm(const SpectralField& c) {
  double sum = 0.0;
  for (const Complex& z : c.coefficients) sum += std::norm(z);
  return std::sqrt(sum * std::pow(2.0 * c.grid.half_width, c.grid.dim));
}

}  // namespace kfp
