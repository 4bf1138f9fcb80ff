#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fraclab/diagnostics.hpp"
#include "fraclab/field.hpp"
#include "fraclab/frac_calc.hpp"
#include "fraclab/kantorovich.hpp"
#include "fraclab/report.hpp"

namespace fraclab {

/// Parameters of the 1D fractional Burgers proxy
///   D_t^alpha u + u u_x = -nu (-Laplacian)^s u + xi.
struct FracFlowParams {
  double alpha = 0.5;
  double s = 0.75;
  double nu = 0.1;
  double sigma_f = 0.0;

  /// 0 < alpha < 1, 0 < s <= 1.5, nu > 0, sigma_f >= 0.
  void validate() const;
};

struct SpectrumSpec {
  double exponent = 2.0;
  int modes = 8;
  std::uint64_t seed = 42;

  void validate() const;
};

/// u(x) = sum_{k=1..modes} k^{-p/2} (a_k cos(k w x) + b_k sin(k w x)), w =
/// 2 pi / length, with a_k, b_k standard Gaussians keyed by the seed. 1D only;
/// rejects modes > points / 4.
Field synth_velocity(const SpectrumSpec& spec, const PeriodicGrid& grid);

struct BurgersOptions {
  bool nonlinear = true;  // false drops u u_x (linear relaxation test)
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;  // one per time node, snapshots[0] = u0
};

/// Explicit L1 Caputo stepping with the full history sum. The right-hand side
/// is pseudo-spectral with 2/3-rule dealiasing of u u_x. Forcing adds
/// sigma_f sqrt(h) (a cos + b sin) on modes 1..4 each step, a and b keyed by
/// (noise_seed, step, mode).
///
/// Throws std::invalid_argument when h^alpha nu k_max^{2s} / Gamma(2-alpha)
/// exceeds 0.5, and std::runtime_error (after reporting an "instability"
/// diagnostic) when max |u| grows past 1e6 max(1, max |u0|) or stops being
/// finite.
Trajectory frac_burgers_solve(const Field& u0, const FracFlowParams& params,
                              const PeriodicGrid& grid, const TimeGrid& t_grid,
                              std::uint64_t noise_seed, BurgersOptions options = {},
                              Diagnostics* diag = nullptr);

/// Largest step ratio h^alpha nu k_max^{2s} / Gamma(2-alpha) on this grid.
double burgers_step_ratio(const FracFlowParams& params, const PeriodicGrid& grid,
                          const TimeGrid& t_grid);

/// eps = nu * integral |(-Laplacian)^{s/2} u|^2 over one period, via Parseval.
double energy_dissipation(const Field& u, const FracFlowParams& params);

/// |eps(phi_n * u) - eps(u)| per n ("abs_err_expectation"). When
/// noise.sigma > 0 and replicates > 0 also reports |eps(mean_r S_r) - eps(u)|
/// ("abs_err_mc") with S_r the white-noise mollifications.
ExperimentReport dissipation_convergence(const Field& u, const FracFlowParams& params,
                                         const std::vector<int>& n_list, const NoiseModel& noise,
                                         std::size_t replicates, unsigned workers = 0);

/// ||phi_n * u - u||_{L2} per n ("l2_error"), excluding boundary-layer
/// samples of boxed fields; slope fitted when n_list has >= 4 entries.
ExperimentReport l2_convergence(const Field& u, const std::vector<int>& n_list);

}  // namespace fraclab
