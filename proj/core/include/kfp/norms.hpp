#pragma once

#include <limits>
#include <span>
#include <vector>

#include "kfp/grid.hpp"
#include "kfp/operators.hpp"

namespace kfp {

// ||<.>^m u||_{L2}.
double weighted_l2(const Field& u, double m);

// ||<D>^order (<.>^m u)||_{L2}: weight first, then the Bessel multiplier.
// The ordering matters and is fixed project-wide.
double weighted_sobolev(const Field& u, double order, double m);

// Seminorm ladders of a state at one instant.  a_k = ||<D>^{2*s_tilde*k} u||
// climbs regularity, b_k = ||<.>^{(gamma/2+s)k} u|| climbs decay.  Both are
// kept as logarithms so large k never overflows; +inf can only appear in the
// plain linear fields (l2, h_s_gamma2, w_gamma2s) and raises overflow_flag.
struct NormReport {
  double t = 0.0;
  double l2 = 0.0;
  double h_s_gamma2 = 0.0;  // ||u||_{H^s_{gamma/2}}
  double w_gamma2s = 0.0;   // ||u||_{2, gamma/2+s}
  std::vector<double> log_a;
  std::vector<double> log_b;
  // Highest k whose a_k is trusted: beyond it the k-th frequency moment is
  // dominated by the outermost resolved shell, i.e. limited by grid
  // truncation rather than by the state itself.
  int k_reliable_a = 0;
  bool overflow_flag = false;
};

// ln ||<D>^{step*k} u|| for k = 0..k_max from one spectral pass per k.
std::vector<double> log_bessel_ladder(const SpectralField& c, double step, int k_max);
// ln ||<.>^{step*k} u|| for k = 0..k_max, evaluated pointwise in log space.
std::vector<double> log_weight_ladder(const Field& u, double step, int k_max);

// Resolution guard: largest k such that step*k*ln(1+|xi|^2_max) stays below
// the gap between the spectral peak and the outermost-shell floor.  Returns
// k_max when the boundary shells are exactly zero (band-limited data).
int reliable_k(const SpectralField& c, double step, int k_max);

NormReport norm_report(const Field& u, double t, const OperatorParams& params, int k_max);

// Envelope fit for a seminorm ladder against C^{k+1} k! / t^k: per-k
// constants C_k = (a_k t^k / k!)^{1/k}, their max, and a flatness verdict.
struct GevreyFit {
  std::vector<double> per_k_constant;  // index 0 carries a_0 itself, unused by the verdict
  double fitted_c = 0.0;               // max over 1 <= k <= k_fit
  double stability_ratio = 1.0;        // max/min of C_k over 2 <= k <= k_fit
  int k_fit = 0;                       // highest k entering the fit
  bool vacuous = false;                // all-zero input
  bool pass = false;
};

// log_seq holds ln a_k for k = 0..k_max; k_fit = min(k_max, k_reliable).
// Throws std::invalid_argument when t <= 0.
GevreyFit fit_gevrey(std::span<const double> log_seq, double t, int k_max,
                     double threshold = 3.0, int k_reliable = 1 << 20);

namespace detail {

// Streaming log-sum-exp; deterministic for a fixed visit order.
class LogSumExp {
 public:
  void add(double log_term);
  double value() const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
};

}  // namespace detail

}  // namespace kfp
