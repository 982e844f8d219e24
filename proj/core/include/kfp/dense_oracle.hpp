#pragma once

#include <vector>

#include "kfp/grid.hpp"
#include "kfp/operators.hpp"

namespace kfp {

// Brute-force reference path for small grids (total_points <= 4096), kept
// independent of the FFT code: matrices are assembled from the multiplier
// symbol by a direct DFT sum.  Row-major square matrices of size
// total_points^2, complex entries.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<Complex> entries;
  Complex& at(std::size_t row, std::size_t col) { return entries[row * n + col]; }
  const Complex& at(std::size_t row, std::size_t col) const { return entries[row * n + col]; }
};

// The generator A = <v>^gamma ((1-Lap)^s + <v>^{2s}) as a dense matrix.
DenseMatrix dense_assemble(const OperatorParams& params, const GridSpec& grid);
// The commutator [<D>^r, <v>^m] as a dense matrix.
DenseMatrix dense_assemble_commutator(const GridSpec& grid, double r, double m);

std::vector<Complex> dense_apply(const DenseMatrix& a, const std::vector<Complex>& x);

// exp(-tA) u0 through an eigendecomposition of the symmetrized generator
// (A is similar to a real symmetric positive definite matrix via the
// diagonal weight <v>^{gamma/2}).  Documented accuracy ~1e-10.
Field dense_expm_apply(const Field& u0, const OperatorParams& params, double t);

// Same propagator through Pade scaling-and-squaring; independent algorithm
// used to cross-check dense_expm_apply.
Field dense_expm_apply_pade(const Field& u0, const OperatorParams& params, double t);

// Direct dense solve of (I + dt A) w = rhs (partial-pivot LU).
Field dense_backward_euler_solve(const Field& rhs, const OperatorParams& params, double dt);

// Largest singular value of the dense generator.
double dense_operator_norm(const OperatorParams& params, const GridSpec& grid);

}  // namespace kfp
