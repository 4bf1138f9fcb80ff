#pragma once

#include <span>

#include "fraclab/diagnostics.hpp"

namespace fraclab {

/// Parameters of the deformed hyperbolic-tangent activation and its lattice
/// sums. `trunc_radius` is the cutoff K for sums over k in [-K, K].
struct KernelParams {
  double q = 1.0;
  double lambda = 1.0;
  int trunc_radius = 40;
  double tail_tol = 1e-13;

  /// Throws std::invalid_argument unless q > 0, lambda > 0, K >= 1, tail_tol > 0.
  void validate() const;
};

/// g(x) = (e^{lx} - q e^{-lx}) / (e^{lx} + q e^{-lx}), evaluated without
/// forming e^{|lx|} so it is finite for any x.
double eval_g(const KernelParams& p, double x);

/// g'(x) = 4 l q / (e^{lx} + q e^{-lx})^2.
double eval_g_prime(const KernelParams& p, double x);

/// M(x) = (g(x+1) - g(x-1)) / 4.
///
/// Computed from the identity g(x) = tanh(l x - ln(q)/2), which turns the
/// difference into sinh(2l) / (4 cosh(A) cosh(B)) with A, B the shifted
/// arguments. The result is strictly positive wherever it does not underflow.
double eval_M(const KernelParams& p, double x);

/// Phi(x) = (M_{q,l}(x) + M_{1/q,l}(x)) / 2. Bitwise even in x.
double eval_Phi(const KernelParams& p, double x);

/// Z(x) = prod_i Phi(x_i). Throws std::invalid_argument for an empty point.
double eval_Z(const KernelParams& p, std::span<const double> x);

/// C with Phi(y) <= C e^{-2 l |y|} for every real y.
double phi_decay_constant(const KernelParams& p);

/// Analytic bound on sum_{|k| > K} Phi(y - k). Infinite when |y| >= K + 1.
double lattice_tail_bound(const KernelParams& p, double y, int K);

/// sum_{|k| <= K} Phi(x - k) with K = p.trunc_radius. Emits a
/// "lattice_tail" diagnostic when the tail bound exceeds p.tail_tol.
double partition_sum(const KernelParams& p, double x, Diagnostics* diag = nullptr);

}  // namespace fraclab
