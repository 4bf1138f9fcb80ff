#include "fraclab/turbulence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fraclab/fft.hpp"
#include "fraclab/mollifier.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/rng.hpp"

namespace fraclab {
namespace {

constexpr int kForcedModes = 4;
constexpr double kGrowthLimit = 1e6;

void check_increasing(const std::vector<int>& n_list) {
  if (n_list.empty()) {
    throw std::invalid_argument("n_list must not be empty");
  }
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw std::invalid_argument("n_list must be positive and strictly increasing");
    }
  }
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_wavenumber(const PeriodicGrid& grid) {
  return std::numbers::pi * static_cast<double>(grid.points) / grid.length;
}

}  // namespace

void FracFlowParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("FracFlowParams: alpha must lie strictly inside (0, 1)");
  }
  if (!(s > 0.0 && s <= 1.5)) {
    throw std::invalid_argument("FracFlowParams: s must lie in (0, 1.5]");
  }
  if (!(nu > 0.0)) {
    throw std::invalid_argument("FracFlowParams: nu must be positive");
  }
  if (!(sigma_f >= 0.0) || !std::isfinite(sigma_f)) {
    throw std::invalid_argument("FracFlowParams: sigma_f must be >= 0");
  }
}

void SpectrumSpec::validate() const {
  if (modes < 2) {
    throw std::invalid_argument("SpectrumSpec: modes must be >= 2");
  }
  if (!std::isfinite(exponent)) {
    throw std::invalid_argument("SpectrumSpec: exponent must be finite");
  }
}

Field synth_velocity(const SpectrumSpec& spec, const PeriodicGrid& grid) {
  spec.validate();
  grid.validate();
  if (grid.dim != 1) {
    throw std::invalid_argument("synth_velocity: only 1D grids are supported");
  }
  if (static_cast<std::size_t>(spec.modes) > grid.points / 4) {
    throw std::invalid_argument("synth_velocity: modes exceeds points / 4");
  }
  std::vector<double> amp(static_cast<std::size_t>(spec.modes) + 1);
  std::vector<double> a(amp.size()), b(amp.size());
  for (int k = 1; k <= spec.modes; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    amp[ku] = std::pow(static_cast<double>(k), -0.5 * spec.exponent);
    const std::array<std::int64_t, 2> ka{k, 0}, kb{k, 1};
    a[ku] = counter_normal(spec.seed, 0, lattice_index(StreamTag::spectrum, ka));
    b[ku] = counter_normal(spec.seed, 0, lattice_index(StreamTag::spectrum, kb));
  }
  const double w = 2.0 * std::numbers::pi / grid.length;
  return sample_periodic_1d(grid, [&](double x) {
    CompensatedSum sum;
    for (std::size_t k = 1; k < amp.size(); ++k) {
      const double kx = static_cast<double>(k) * w * x;
      sum.add(amp[k] * (a[k] * std::cos(kx) + b[k] * std::sin(kx)));
    }
    return sum.value();
  });
}

double burgers_step_ratio(const FracFlowParams& params, const PeriodicGrid& grid,
                          const TimeGrid& t_grid) {
  return std::pow(t_grid.step(), params.alpha) * params.nu *
         std::pow(max_wavenumber(grid), 2.0 * params.s) / gamma_fn(2.0 - params.alpha);
}

Trajectory frac_burgers_solve(const Field& u0, const FracFlowParams& params,
                              const PeriodicGrid& grid, const TimeGrid& t_grid,
                              std::uint64_t noise_seed, BurgersOptions options,
                              Diagnostics* diag) {
  params.validate();
  grid.validate();
  t_grid.validate();
  u0.validate();
  if (grid.dim != 1 || u0.dim != 1 || !u0.periodic || u0.points != grid.points) {
    throw std::invalid_argument("frac_burgers_solve: u0 must be a 1D periodic field on grid");
  }
  const double ratio = burgers_step_ratio(params, grid, t_grid);
  if (ratio > 0.5) {
    throw std::invalid_argument("frac_burgers_solve: step too large, h^alpha nu k_max^{2s} / "
                                "Gamma(2-alpha) = " + std::to_string(ratio) + " > 0.5");
  }

  const std::size_t p = grid.points;
  const std::size_t steps = t_grid.steps;
  const double a = params.alpha;
  const double h = t_grid.step();
  const double drive = gamma_fn(2.0 - a) * std::pow(h, a);
  const std::vector<double> xi = fft::wavenumbers(p, grid.length);
  std::vector<double> damping(p);
  std::vector<bool> keep(p);
  for (std::size_t i = 0; i < p; ++i) {
    damping[i] = i == 0 ? 0.0 : params.nu * std::pow(std::abs(xi[i]), 2.0 * params.s);
    keep[i] = 3 * std::abs(fft::mode_index(i, p)) <= static_cast<long>(p);
  }
  std::vector<double> b(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double jd = static_cast<double>(j);
    b[j] = std::pow(jd + 1.0, 1.0 - a) - std::pow(jd, 1.0 - a);
  }
  const double w = 2.0 * std::numbers::pi / grid.length;
  const double force_scale = params.sigma_f * std::sqrt(h);

  auto rhs = [&](const std::vector<double>& u) {
    fft::Spectrum uh = fft::forward(u, 1, p);
    fft::Spectrum out(p);
    for (std::size_t i = 0; i < p; ++i) {
      out[i] = -damping[i] * uh[i];
    }
    if (options.nonlinear) {
      fft::Spectrum ud(p), uxd(p);
      for (std::size_t i = 0; i < p; ++i) {
        if (keep[i]) {
          ud[i] = uh[i];
          uxd[i] = std::complex<double>(0.0, xi[i]) * uh[i];
        }
      }
      const std::vector<double> uf = fft::inverse_real(std::move(ud), 1, p);
      const std::vector<double> uxf = fft::inverse_real(std::move(uxd), 1, p);
      std::vector<double> prod(p);
      for (std::size_t i = 0; i < p; ++i) {
        prod[i] = uf[i] * uxf[i];
      }
      const fft::Spectrum nh = fft::forward(prod, 1, p);
      for (std::size_t i = 0; i < p; ++i) {
        if (keep[i]) {
          out[i] -= nh[i];
        }
      }
    }
    return fft::inverse_real(std::move(out), 1, p);
  };

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.snapshots.reserve(steps + 1);
  traj.times.push_back(t_grid.node(0));
  traj.snapshots.push_back(u0);
  const double limit = kGrowthLimit * std::max(1.0, max_abs(u0.values));
  // diffs[m] = u^{m+1} - u^m
  std::vector<std::vector<double>> diffs;
  diffs.reserve(steps);
  for (std::size_t n = 1; n <= steps; ++n) {
    const std::vector<double>& prev = traj.snapshots.back().values;
    const std::vector<double> f = rhs(prev);
    std::vector<CompensatedSum> acc(p);
    for (std::size_t i = 0; i < p; ++i) {
      acc[i].add(prev[i]);
      acc[i].add(drive * f[i]);
    }
    for (std::size_t j = 1; j < n; ++j) {
      const std::vector<double>& d = diffs[n - 1 - j];
      for (std::size_t i = 0; i < p; ++i) {
        acc[i].add(-b[j] * d[i]);
      }
    }
    std::vector<double> next(p);
    for (std::size_t i = 0; i < p; ++i) {
      next[i] = acc[i].value();
    }
    if (force_scale > 0.0) {
      for (int k = 1; k <= kForcedModes; ++k) {
        const std::array<std::int64_t, 2> ka{k, 0}, kb{k, 1};
        const double fa = force_scale * counter_normal(noise_seed, n, lattice_index(StreamTag::forcing, ka));
        const double fb = force_scale * counter_normal(noise_seed, n, lattice_index(StreamTag::forcing, kb));
        for (std::size_t i = 0; i < p; ++i) {
          const double kx = static_cast<double>(k) * w * (u0.origin + grid.spacing() * static_cast<double>(i));
          next[i] += fa * std::cos(kx) + fb * std::sin(kx);
        }
      }
    }
    if (!all_finite(next) || max_abs(next) > limit) {
      const double norm = max_abs(next);
      report(diag, "instability",
             "frac_burgers_solve: field norm exceeded growth limit at step " + std::to_string(n),
             norm);
      throw std::runtime_error("frac_burgers_solve: instability detected at step " +
                               std::to_string(n) + " (max |u| = " + std::to_string(norm) + ")");
    }
    std::vector<double> d(p);
    for (std::size_t i = 0; i < p; ++i) {
      d[i] = next[i] - prev[i];
    }
    diffs.push_back(std::move(d));
    traj.times.push_back(t_grid.node(n));
    traj.snapshots.push_back(with_values(u0, std::move(next)));
  }
  return traj;
}

double energy_dissipation(const Field& u, const FracFlowParams& params) {
  u.validate();
  if (!u.periodic) {
    throw std::invalid_argument("energy_dissipation: field must be periodic");
  }
  if (!(params.nu > 0.0) || !(params.s > 0.0)) {
    throw std::invalid_argument("energy_dissipation: nu and s must be positive");
  }
  const std::size_t p = u.points;
  const fft::Spectrum uh = fft::forward(u.values, u.dim, p);
  const std::vector<double> xi = fft::wavenumbers(p, u.length);
  const double total = static_cast<double>(u.size());
  CompensatedSum sum;
  if (u.dim == 1) {
    for (std::size_t i = 1; i < p; ++i) {
      sum.add(std::pow(std::abs(xi[i]), 2.0 * params.s) * std::norm(uh[i] / total));
    }
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        if (i == 0 && j == 0) {
          continue;
        }
        const double k2 = xi[i] * xi[i] + xi[j] * xi[j];
        sum.add(std::pow(k2, params.s) * std::norm(uh[i * p + j] / total));
      }
    }
  }
  return params.nu * std::pow(u.length, u.dim) * sum.value();
}

ExperimentReport dissipation_convergence(const Field& u, const FracFlowParams& params,
                                         const std::vector<int>& n_list, const NoiseModel& noise,
                                         std::size_t replicates, unsigned workers) {
  check_increasing(n_list);
  ExperimentReport report;
  report.experiment = "dissipation";
  const double eps = energy_dissipation(u, params);
  report.add_row("", 0, "eps_exact", eps);
  const Mollifier bump = make_bump(u.dim);
  const bool monte_carlo = noise.sigma > 0.0 && replicates > 0;
  NoiseModel white = noise;
  white.kind = NoiseKind::white_noise_measure;
  for (const int n : n_list) {
    const ScaledKernel kernel{bump, n, 0.0};
    const double eps_n = energy_dissipation(mollify(u, kernel), params);
    report.add_row("", n, "abs_err_expectation", std::abs(eps_n - eps));
    if (!monte_carlo) {
      continue;
    }
    // Reduce in replicate order, a block at a time, so worker count never
    // changes the result.
    constexpr std::size_t kBlock = 64;
    std::vector<CompensatedSum> mean(u.size());
    std::vector<Field> block(kBlock);
    for (std::size_t start = 0; start < replicates; start += kBlock) {
      const std::size_t count = std::min(kBlock, replicates - start);
      parallel_for(count, workers, [&](std::size_t r) {
        block[r] = stochastic_mollify_sample(u, kernel, white, start + r);
      });
      for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t i = 0; i < u.size(); ++i) {
          mean[i].add(block[r].values[i]);
        }
      }
    }
    std::vector<double> avg(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      avg[i] = mean[i].value() / static_cast<double>(replicates);
    }
    report.add_row("", n, "abs_err_mc", std::abs(energy_dissipation(with_values(u, avg), params) - eps));
  }
  return report;
}

ExperimentReport l2_convergence(const Field& u, const std::vector<int>& n_list) {
  check_increasing(n_list);
  ExperimentReport report;
  report.experiment = "l2";
  const Mollifier bump = make_bump(u.dim);
  for (const int n : n_list) {
    const Field m = mollify(u, ScaledKernel{bump, n, 0.0});
    CompensatedSum sum;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!m.boundary_layer.empty() && m.boundary_layer[i] != 0) {
        continue;
      }
      const double d = m.values[i] - u.values[i];
      sum.add(d * d);
    }
    report.add_row("", n, "l2_error", std::sqrt(sum.value() * u.cell_volume()));
  }
  const std::vector<double> errs = report.values("", "l2_error");
  if (std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0.0; })) {
    report.fit("", "l2_error");
  }
  return report;
}

}  // namespace fraclab
