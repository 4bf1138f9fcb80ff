#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fraclab/field.hpp"

namespace fraclab {

/// Fractional order alpha, strictly inside (0, 1).
class FracOrder {
 public:
  explicit FracOrder(double alpha);
  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Uniform time grid t_i = t0 + i h, i = 0..steps, h = (t1 - t0) / steps.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t steps = 2;

  void validate() const;
  double step() const { return (t1 - t0) / static_cast<double>(steps); }
  double node(std::size_t i) const { return t0 + step() * static_cast<double>(i); }
  std::size_t nodes() const { return steps + 1; }
};

/// Gamma function for x > 0: exact factorials for small integers, otherwise a
/// 9-term Lanczos approximation (g = 7) with reflection below 1/2.
double gamma_fn(double x);

/// ln Gamma(x) for x > 0 via the same Lanczos sum.
double log_gamma_fn(double x);

/// E_alpha(z) = sum_j z^j / Gamma(alpha j + 1) for z <= 0.
///
/// The series is summed with compensation until a geometric remainder bound
/// drops below 1e-13. Throws std::domain_error when cancellation among the
/// alternating terms could exceed an absolute error of 1e-10, and
/// std::invalid_argument for z > 0.
double mittag_leffler(FracOrder alpha, double z);
double mittag_leffler(double alpha, double z);  // alpha in (0, 1]

/// L1 discretization of the Caputo derivative with lower limit t0:
///   D[n] = h^{-a} / Gamma(2-a) * sum_{j<n} b_j (f[n-j] - f[n-j-1]),
///   b_j = (j+1)^{1-a} - j^{1-a}.
/// D[0] = 0. Requires f.size() == grid.nodes().
std::vector<double> caputo_l1(std::span<const double> f, const TimeGrid& grid, FracOrder alpha);

/// max_{i<j} |f_i - f_j| / |x_i - x_j|^alpha over a uniform 1D grid of the
/// given spacing. A lower bound for the Holder/Gagliardo seminorm.
double gagliardo_seminorm(std::span<const double> f, double spacing, FracOrder alpha);
double gagliardo_seminorm(const Field& f, FracOrder alpha);

/// max |f| + max |caputo_l1(f)|, the W^{alpha,inf} norm on [t0, t1].
double frac_sobolev_norm(std::span<const double> f, const TimeGrid& grid, FracOrder alpha);

/// (-Laplacian)^s on a periodic grid: multiply every Fourier mode by
/// |xi|^{2s}, with the zero mode mapped to 0. Throws std::invalid_argument for
/// non-periodic or non-power-of-two fields, std::runtime_error if the inverse
/// transform leaves an imaginary residue above 1e-12 relative to max |u| times the
/// largest multiplier.
Field frac_laplacian(const Field& u, double s);

}  // namespace fraclab
