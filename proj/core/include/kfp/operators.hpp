#pragma once

#include <algorithm>

#include "kfp/grid.hpp"

namespace kfp {

// Parameters of the kinetic operator
//   A u = <v>^gamma ( (1 - Lap)^s u + <v>^{2s} u ),   <v> = (1 + |v|^2)^{1/2},
// restricted to the admissible range s in (0, 1], gamma + 2s > 0.
struct OperatorParams {
  double gamma = 0.0;
  double s = 0.5;

  // Exponent step of the frequency-side regularity ladder.
  double s_tilde() const { return std::min(0.5, s); }
  // Exponent step of the weight-side decay ladder, gamma/2 + s.
  double weight_exponent() const { return gamma / 2.0 + s; }

  bool operator==(const OperatorParams&) const = default;
};

OperatorParams make_operator_params(double gamma, double s);

// Pointwise samples of <v>^m on the grid.  Entries overflow to +inf for
// exponents beyond the double range; norm computations that need such
// weights work in the log domain instead (see norms.hpp).
Field bracket_weight(const GridSpec& grid, double m);

// <D>^r u, the Fourier multiplier (1 + |xi|^2)^{r/2}.
SpectralField bessel_power(const SpectralField& c, double r);
Field bessel_power(const Field& u, double r);

// A u as defined above, evaluated as the exact composition of the three
// pieces: one multiplier application and two diagonal weights.
Field apply_kfp(const Field& u, const OperatorParams& params);

// [ <D>^r, <v>^m ] u = <D>^r (<v>^m u) - <v>^m <D>^r u, exact by
// construction from the two factors.
Field commutator_bessel_weight(const Field& u, double r, double m);

// Upper bound for the spectral radius of the discretized A: the product of
// the largest grid samples of the three symbol factors,
//   max <v>^gamma * ( (1 + |xi|_max^2)^s + max <v>^{2s} ).
// Used for the explicit-step stability bound.
double symbol_bound(const OperatorParams& params, const GridSpec& grid);

namespace detail {

// exp(0.5 * m * log1p(x)) = (1 + x)^{m/2}; the single shared definition of
// bracket powers so linear- and log-domain paths agree.
double half_power_log1p(double x_sq, double m);

}  // namespace detail

}  // namespace kfp
