#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace kfp {

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 3;

// Uniform periodic truncation of velocity space: the box [-L, L)^dim sampled
// at N points per axis, v_j = -L + j*h with h = 2L/N.  The matching Fourier
// modes are exp(i xi_k . v) with xi_k = (pi/L) k and integer wavenumbers
// k in [-N/2, N/2).  Storage of both physical values and spectral
// coefficients is lexicographic in the per-axis index, axis 0 slowest;
// spectral slot i holds wavenumber k = i for i < N/2 and k = i - N above.
struct GridSpec {
  int dim = 1;
  double half_width = 1.0;  // L
  int n_per_axis = 8;       // N, even, >= 8

  std::size_t total_points() const;
  double spacing() const { return 2.0 * half_width / n_per_axis; }
  double freq_unit() const;  // pi / L, the spacing of the xi lattice

  double point(int axis_index) const;       // v = -L + j*h
  int wavenumber(int storage_index) const;  // signed k for a spectral slot
  double frequency(int storage_index) const { return freq_unit() * wavenumber(storage_index); }

  // |xi|^2 at the corner of the frequency box, dim * (pi N / (2L))^2.
  double max_frequency_sq() const;

  bool operator==(const GridSpec&) const = default;
};

// Validates and returns the spec.  Throws std::invalid_argument for
// dim outside [1, 3], non-positive half_width, odd N, or N < 8.
GridSpec make_grid(int dim, double half_width, int n_per_axis);

struct Field {
  GridSpec grid;
  std::vector<Complex> values;
};

struct SpectralField {
  GridSpec grid;
  std::vector<Complex> coefficients;
};

Field make_field(const GridSpec& grid);
SpectralField make_spectral_field(const GridSpec& grid);

// Forward/inverse transforms in the convention above: to_physical performs
// the synthesis u_j = sum_k c_k exp(i xi_k . v_j) and to_spectral inverts it
// exactly (up to roundoff).  Both are plain dense transforms, O(N^d log N).
SpectralField to_spectral(const Field& u);
Field to_physical(const SpectralField& c);

// Rectangle-rule L2 quadrature, exact for the trigonometric polynomials the
// grid can represent: ||u||^2 = h^d sum_j |u_j|^2.
double l2_norm(const Field& u);
// Conjugate-linear in the second argument: h^d sum_j u_j conj(w_j).
Complex inner_product(const Field& u, const Field& w);
// Plancherel form of the same norm, (2L)^{d/2} sqrt(sum_k |c_k|^2).
double spectral_l2_norm(const SpectralField& c);

// Per-axis lookup tables (size N): sample points and signed frequencies in
// storage order.
std::vector<double> axis_points(const GridSpec& grid);
std::vector<double> axis_frequencies(const GridSpec& grid);

namespace detail {

// Visits every flat index together with the squared radius built from the
// given per-axis table of values (|v_j|^2 or |xi_k|^2).
template <typename F>
void for_each_radius_sq(const GridSpec& grid, const std::vector<double>& axis_values_sq, F&& visit) {
  const int n = grid.n_per_axis;
  const int dim = grid.dim;
  std::array<int, kMaxDim> idx{};
  const std::size_t total = grid.total_points();
  for (std::size_t flat = 0; flat < total; ++flat) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += axis_values_sq[static_cast<std::size_t>(idx[a])];
    visit(flat, r2);
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
  }
}

}  // namespace detail

// Squared-value tables for the helpers above.
std::vector<double> axis_points_sq(const GridSpec& grid);
std::vector<double> axis_frequencies_sq(const GridSpec& grid);

// True if any per-axis index of the flat position lies on the outermost two
// wavenumber shells (|k| >= N/2 - 1); used by resolution diagnostics.
bool on_frequency_boundary(const GridSpec& grid, std::size_t flat);
// True if any per-axis index is 0 or N-1 (spatial box boundary cells).
bool on_spatial_boundary(const GridSpec& grid, std::size_t flat);

}  // namespace kfp
