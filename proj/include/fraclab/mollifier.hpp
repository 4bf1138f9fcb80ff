#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "fraclab/field.hpp"
#include "fraclab/frac_calc.hpp"
#include "fraclab/kantorovich.hpp"

namespace fraclab {

/// Radially symmetric bump phi(x) = c exp(-1 / (1 - |x|^2)) on the open unit
/// ball of R^N, zero elsewhere, normalized so that its integral is one.
struct Mollifier {
  int dim = 1;
  double normalization = 0.0;  // c
  double l2_norm_sq = 0.0;     // integral of phi^2

  double eval_radius(double r) const;
  double eval(std::span<const double> x) const;
  /// Integral of phi, recomputed by radial quadrature.
  double mass() const;
};

/// Bump mollifier for dim 1 or 2. Throws std::invalid_argument otherwise, and
/// std::runtime_error if the quadrature-checked mass misses one by > 1e-10.
Mollifier make_bump(int dim);

/// phi_n^gamma(x) = n^{N - gamma} phi(n x); gamma = 0 is the unit-mass scaling.
struct ScaledKernel {
  Mollifier base;
  int n = 1;
  double gamma = 0.0;

  void validate() const;
  double amplitude() const;
  double eval(std::span<const double> x) const;
};

/// Discrete convolution (phi_n * u)(x_i) = sum_j u_j phi_n(x_i - x_j) h^N.
///
/// Periodic fields wrap around and are convolved through the FFT. Boxed
/// (1D) fields extend by their edge values and flag every output within 1/n
/// of an edge in `boundary_layer`. Throws std::invalid_argument when the grid
/// spacing exceeds 1/(4n) or the kernel support exceeds half the period.
Field mollify(const Field& u, const ScaledKernel& kernel);

/// Same sum evaluated directly at one (flat) grid index.
double mollify_at(const Field& u, std::size_t index, const ScaledKernel& kernel);

/// Integral of phi_n^2 over its support; equals n^{N - 2 gamma} ||phi||^2.
double l2_norm_sq_scaled(const ScaledKernel& kernel);

/// C_phi = integral of |w|^exponent phi(w) dw (exponent >= 0).
double c_phi(const Mollifier& moll, double exponent, int order = 20);
double c_phi(const Mollifier& moll, FracOrder alpha);

/// One realization of the white-noise-measure integral
///   sum_j u_j phi_n(x - y_j) dZ_j,  dZ_j = h^N + sigma h^{N/2} xi_j,
/// with xi_j keyed by (seed, replicate, cell j). Requires
/// noise.kind == white_noise_measure. sigma = 0 reproduces mollify exactly.
Field stochastic_mollify_sample(const Field& u, const ScaledKernel& kernel, const NoiseModel& noise,
                                std::uint64_t replicate);

/// The same realization evaluated at one grid index (direct sum).
double stochastic_mollify_sample_at(const Field& u, std::size_t index, const ScaledKernel& kernel,
                                    const NoiseModel& noise, std::uint64_t replicate);

/// sigma^2 sum_j u_j^2 phi_n(x - y_j)^2 h^N, the pointwise variance.
double stochastic_variance_at(const Field& u, std::size_t index, const ScaledKernel& kernel,
                              double sigma);

struct MseDecomposition {
  double target = 0.0;       // u(x)
  double expectation = 0.0;  // (phi_n * u)(x)
  double bias_sq = 0.0;
  double mean = 0.0;         // Monte Carlo mean
  double variance = 0.0;     // Monte Carlo variance (unbiased)
  double variance_se = 0.0;
  double mse = 0.0;          // Monte Carlo mean of (sample - u(x))^2
  double mse_se = 0.0;
  std::size_t replicates = 0;
};

/// Bias^2 from the deterministic mollification, variance and mse from
/// `replicates` (>= 100) Monte Carlo realizations at grid index `index`.
/// `workers` = 0 uses the hardware concurrency; results never depend on it.
MseDecomposition mse_decomposition(const Field& u, std::size_t index, const ScaledKernel& kernel,
                                   const NoiseModel& noise, std::size_t replicates,
                                   unsigned workers = 0);

/// Flat index of the grid node nearest to x (periodic wrap for periodic fields).
std::size_t nearest_index(const Field& u, std::span<const double> x);

}  // namespace fraclab
