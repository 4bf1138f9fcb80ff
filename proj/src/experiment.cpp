#include "fraclab/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <type_traits>
#include <numbers>
#include <sstream>

#include "fraclab/fft.hpp"
#include "fraclab/frac_calc.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/mollifier.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/stats.hpp"
#include "fraclab/turbulence.hpp"

namespace fraclab {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string label(const char* name, double v) { return std::string(name) + "=" + fmt("%g", v); }

std::vector<int> n_list_or(const RunConfig& c, std::vector<int> fallback) {
  return c.n_list.empty() ? fallback : c.n_list;
}

std::size_t points_or(const RunConfig& c, std::size_t fallback) {
  return c.points == 0 ? fallback : c.points;
}

KernelParams kernel_params(const RunConfig& c) {
  KernelParams p;
  p.q = c.q;
  p.lambda = c.lambda;
  p.trunc_radius = c.K;
  return p;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) {
      return false;
    }
  }
  return true;
}

void check_slope(ExperimentReport& report, const std::string& name, const std::string& param,
                 const std::string& metric, double target, double tol) {
  const auto fit = report.fit(param, metric);
  if (!fit) {
    report.add_check(name, false, "fewer than 4 points for a slope fit");
    return;
  }
  const bool ok = std::abs(fit->slope - target) <= tol;
  report.add_check(name, ok,
                   "slope " + fmt("%.4f", fit->slope) + " +/- " + fmt("%.4f", fit->half_width) +
                       ", expected " + fmt("%.4f", target) + " +/- " + fmt("%g", tol));
}

// Polynomial in N variables for the exact-moment checks.
struct Monomial {
  double coef;
  std::vector<int> powers;
};

SmoothFn polynomial(std::vector<Monomial> terms) {
  auto shared = std::make_shared<std::vector<Monomial>>(std::move(terms));
  SmoothFn f;
  f.value = [shared](std::span<const double> x) {
    double total = 0.0;
    for (const Monomial& m : *shared) {
      double v = m.coef;
      for (std::size_t i = 0; i < x.size(); ++i) {
        v *= std::pow(x[i], m.powers[i]);
      }
      total += v;
    }
    return total;
  };
  f.derivative = [shared](std::span<const double> x, std::span<const int> beta) {
    double total = 0.0;
    for (const Monomial& m : *shared) {
      double v = m.coef;
      for (std::size_t i = 0; i < x.size() && v != 0.0; ++i) {
        const int p = m.powers[i];
        const int b = beta[i];
        if (b > p) {
          v = 0.0;
          break;
        }
        for (int j = 0; j < b; ++j) {
          v *= p - j;
        }
        v *= std::pow(x[i], p - b);
      }
      total += v;
    }
    return total;
  };
  return f;
}

// prod_i sin(x_i + 0.3) with exact partials.
SmoothFn shifted_sine_product() {
  SmoothFn f;
  f.value = [](std::span<const double> x) {
    double v = 1.0;
    for (const double xi : x) {
      v *= std::sin(xi + 0.3);
    }
    return v;
  };
  f.derivative = [](std::span<const double> x, std::span<const int> beta) {
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      v *= std::sin(x[i] + 0.3 + 0.5 * std::numbers::pi * beta[i]);
    }
    return v;
  };
  return f;
}

ExperimentReport run_kernel(const RunConfig& c) {
  ExperimentReport report;
  const KernelParams p = kernel_params(c);
  const std::string param = label("q", c.q) + ";" + label("lambda", c.lambda);
  double worst_dev = 0.0, worst_asym = 0.0;
  bool positive = true;
  Diagnostics diag;
  for (int i = 0; i <= 24; ++i) {
    const double x = -3.0 + 0.25 * i;
    const double dev = std::abs(partition_sum(p, x, &diag) - 1.0);
    const double asym = std::abs(eval_Phi(p, x) - eval_Phi(p, -x));
    report.add_row(param, x, "partition_dev", dev);
    report.add_row(param, x, "phi_asymmetry", asym);
    worst_dev = std::max(worst_dev, dev);
    worst_asym = std::max(worst_asym, asym);
    positive = positive && eval_Phi(p, x) > 0.0 && eval_M(p, x) > 0.0;
  }
  report.add_row(param, 0, "tail_bound", lattice_tail_bound(p, 0.5, c.K));
  report.add_row(param, 0, "decay_constant", phi_decay_constant(p));
  report.add_check("partition_of_unity", worst_dev < 1e-10,
                   "max |sum - 1| = " + fmt("%.3g", worst_dev) +
                       (diag.empty() ? "" : " (tail bound above tolerance)"));
  report.add_check("phi_even", worst_asym <= 1e-14, "max asymmetry " + fmt("%.3g", worst_asym));
  report.add_check("positivity", positive, positive ? "Phi, M > 0" : "nonpositive value");
  return report;
}

ExperimentReport run_caputo(const RunConfig& c) {
  ExperimentReport report;
  const FracOrder alpha(c.alpha);
  const double a = c.alpha;
  const std::vector<int> steps = n_list_or(c, {64, 128, 256, 512, 1024});
  double worst_linear = 0.0;
  for (const int n : steps) {
    const TimeGrid grid{0.0, c.t1, static_cast<std::size_t>(n)};
    grid.validate();
    std::vector<double> f1(grid.nodes()), f2(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      const double t = grid.node(i);
      f1[i] = t;
      f2[i] = t * t;
    }
    const std::vector<double> d1 = caputo_l1(f1, grid, alpha);
    const std::vector<double> d2 = caputo_l1(f2, grid, alpha);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 1; i < grid.nodes(); ++i) {
      const double t = grid.node(i);
      e1 = std::max(e1, std::abs(d1[i] - std::pow(t, 1.0 - a) / gamma_fn(2.0 - a)));
      e2 = std::max(e2, std::abs(d2[i] - 2.0 * std::pow(t, 2.0 - a) / gamma_fn(3.0 - a)));
    }
    report.add_row("f=t", n, "max_error", e1);
    report.add_row("f=t^2", n, "max_error", e2);
    report.add_row("f=t^2", n, "sobolev_norm", frac_sobolev_norm(f2, grid, alpha));
    worst_linear = std::max(worst_linear, e1);
  }
  const double scale = std::max(1.0, std::pow(c.t1, 1.0 - a) / gamma_fn(2.0 - a));
  report.add_check("linear_exact", worst_linear <= 1e-12 * scale,
                   "L1 scheme is exact on f = t; max error " + fmt("%.3g", worst_linear));
  check_slope(report, "quadratic_order", "f=t^2", "max_error", -(2.0 - a), 0.2);
  return report;
}

ExperimentReport run_kantorovich_rates(const RunConfig& c) {
  ExperimentReport report;
  const KernelParams p = kernel_params(c);
  const double a = c.alpha;
  const double x0 = 1.0 / 3.0;
  const ScalarFn holder = [=](std::span<const double> x) { return std::pow(std::abs(x[0] - x0), a); };
  const ScalarFn smooth = [](std::span<const double> x) { return std::sin(kTwoPi * x[0]); };
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) {
    xs.push_back(0.01 * i);
  }
  xs.push_back(x0);
  const std::string holder_param = label("alpha", a);
  for (const int n : n_list_or(c, {8, 16, 32, 64, 128})) {
    const GridSpec grid{n, 1, Box{{0.0}, {1.0}}};
    const std::vector<double> errs = parallel_map(xs.size(), c.workers, [&](std::size_t i) {
      const std::array<double, 1> x{xs[i]};
      return std::abs(apply_expectation(holder, x, grid, p) - holder(x));
    });
    const std::vector<double> smooth_errs = parallel_map(xs.size(), c.workers, [&](std::size_t i) {
      const std::array<double, 1> x{xs[i]};
      return std::abs(apply_expectation(smooth, x, grid, p) - smooth(x));
    });
    report.add_row(holder_param, n, "sup_error", *std::max_element(errs.begin(), errs.end()));
    report.add_row("f=sin", n, "sup_error",
                   *std::max_element(smooth_errs.begin(), smooth_errs.end()));
  }
  check_slope(report, "holder_rate", holder_param, "sup_error", -a, 0.2);
  report.fit("f=sin", "sup_error");
  return report;
}

ExperimentReport variance_scaling_mollifier(const RunConfig& c) {
  ExperimentReport report;
  const std::size_t points = points_or(c, 1024);
  const PeriodicGrid grid{kTwoPi, points, c.dim};
  const Field u = sample_periodic(grid, [](std::span<const double> x) {
    double v = 1.0;
    for (const double xi : x) {
      v += 0.5 * std::sin(xi);
    }
    return v;
  });
  const Mollifier bump = make_bump(c.dim);
  const std::vector<double> x(static_cast<std::size_t>(c.dim), 1.0);
  const std::size_t index = nearest_index(u, x);
  const NoiseModel noise{c.sigma, c.seed, NoiseKind::white_noise_measure};
  const std::string param = label("sigma", c.sigma) + ";" + label("dim", c.dim);
  bool mean_ok = true, var_ok = true;
  std::string detail;
  for (const int n : n_list_or(c, {4, 8, 16, 32})) {
    const ScaledKernel kernel{bump, n, c.gamma};
    const std::vector<double> draws = parallel_map(c.replicates, c.workers, [&](std::size_t r) {
      return stochastic_mollify_sample_at(u, index, kernel, noise, r);
    });
    const SampleMoments m = sample_moments(draws);
    const double expectation = mollify_at(u, index, kernel);
    const double closed = stochastic_variance_at(u, index, kernel, c.sigma);
    report.add_row(param, n, "mean_mc", m.mean, m.mean_se);
    report.add_row(param, n, "expectation", expectation);
    report.add_row(param, n, "variance_mc", m.variance, m.variance_se);
    report.add_row(param, n, "variance_closed", closed);
    mean_ok = mean_ok && std::abs(m.mean - expectation) <= 3.0 * m.mean_se;
    var_ok = var_ok && std::abs(m.variance - closed) <= 3.0 * m.variance_se;
  }
  report.add_check("mean_within_3se", mean_ok, "Monte Carlo mean vs deterministic mollification");
  report.add_check("variance_within_3se", var_ok, "Monte Carlo variance vs closed form");
  if (c.sigma > 0.0) {
    check_slope(report, "variance_growth", param, "variance_mc", static_cast<double>(c.dim), 0.3);
  }
  return report;
}

ExperimentReport variance_scaling_lattice(const RunConfig& c) {
  ExperimentReport report;
  const KernelParams p = kernel_params(c);
  const ScalarFn f = [](std::span<const double> x) {
    double v = 1.0;
    for (const double xi : x) {
      v *= std::sin(kTwoPi * xi);
    }
    return 2.0 + v;
  };
  const std::vector<double> x(static_cast<std::size_t>(c.dim), 0.37);
  const NoiseModel noise{c.sigma, c.seed, NoiseKind::cell_multiplier};
  const std::string param = label("sigma", c.sigma) + ";" + label("dim", c.dim);
  bool mean_ok = true, var_ok = true;
  for (const int n : n_list_or(c, {8, 16, 32, 64})) {
    GridSpec grid{n, c.dim, Box{std::vector<double>(x.size(), 0.0), std::vector<double>(x.size(), 1.0)}};
    const KantorovichStencil stencil(f, x, grid, p);
    const std::vector<double> draws = parallel_map(
        c.replicates, c.workers, [&](std::size_t r) { return stencil.sample(noise, r); });
    const SampleMoments m = sample_moments(draws);
    const double closed = stencil.variance(c.sigma);
    report.add_row(param, n, "mean_mc", m.mean, m.mean_se);
    report.add_row(param, n, "expectation", stencil.expectation());
    report.add_row(param, n, "variance_mc", m.variance, m.variance_se);
    report.add_row(param, n, "variance_closed", closed);
    mean_ok = mean_ok && std::abs(m.mean - stencil.expectation()) <= 3.0 * m.mean_se;
    var_ok = var_ok && std::abs(m.variance - closed) <= 3.0 * m.variance_se;
  }
  report.add_check("mean_within_3se", mean_ok, "Monte Carlo mean vs apply_expectation");
  report.add_check("variance_within_3se", var_ok, "Monte Carlo variance vs closed form");
  // The lattice variance rate is measured only.
  if (c.sigma > 0.0) {
    report.fit(param, "variance_closed");
  }
  return report;
}

ExperimentReport run_variance_scaling(const RunConfig& c) {
  const NoiseKind kind = c.kind.value_or(NoiseKind::white_noise_measure);
  return kind == NoiseKind::white_noise_measure ? variance_scaling_mollifier(c)
                                                : variance_scaling_lattice(c);
}

ExperimentReport run_voronovskaya(const RunConfig& c) {
  ExperimentReport report;
  const KernelParams p = kernel_params(c);
  const int dim = c.dim;
  const auto d = static_cast<std::size_t>(dim);
  std::vector<Monomial> linear{{0.5, std::vector<int>(d, 0)}};
  std::vector<Monomial> quadratic{{0.5, std::vector<int>(d, 0)}};
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<int> e(d, 0);
    e[i] = 1;
    linear.push_back({1.0 + static_cast<double>(i), e});
    quadratic.push_back({-2.0 + static_cast<double>(i), e});
    e[i] = 2;
    quadratic.push_back({1.5 - static_cast<double>(i), e});
  }
  if (dim == 2) {
    quadratic.push_back({0.75, {1, 1}});
  }
  const SmoothFn lin = polynomial(linear);
  const SmoothFn quad = polynomial(quadratic);
  const SmoothFn sine = shifted_sine_product();
  std::vector<double> x{0.37, 0.61};
  x.resize(d);
  const std::string param = label("dim", dim);
  double worst_poly = 0.0;
  for (const int n : n_list_or(c, {8, 16, 32, 64})) {
    const GridSpec grid{n, dim, Box{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)}};
    const double r1 = std::abs(voronovskaya_remainder(lin, x, grid, p, 1));
    const double r2 = std::abs(voronovskaya_remainder(quad, x, grid, p, 2));
    const double rq1 = std::abs(voronovskaya_remainder(quad, x, grid, p, 1));
    report.add_row(param, n, "poly_deg1_m1", r1);
    report.add_row(param, n, "poly_deg2_m2", r2);
    report.add_row(param, n, "poly_deg2_m1", rq1);
    report.add_row(param, n, "sin_m1", std::abs(voronovskaya_remainder(sine, x, grid, p, 1)));
    report.add_row(param, n, "sin_m2", std::abs(voronovskaya_remainder(sine, x, grid, p, 2)));
    worst_poly = std::max({worst_poly, r1, r2});
  }
  report.add_check("polynomial_exact", worst_poly <= 1e-10,
                   "max polynomial remainder " + fmt("%.3g", worst_poly));
  const auto s1 = report.fit(param, "sin_m1");
  const auto s2 = report.fit(param, "sin_m2");
  if (s1 && s2) {
    report.add_check("sin_m2_faster", s2->slope < s1->slope,
                     "slopes m=1 " + fmt("%.3f", s1->slope) + ", m=2 " + fmt("%.3f", s2->slope));
  } else {
    report.add_check("sin_m2_faster", false, "fewer than 4 points for a slope fit");
  }
  return report;
}

ExperimentReport run_mollifier_rates(const RunConfig& c) {
  ExperimentReport report;
  const std::size_t points = points_or(c, 65536);
  const Mollifier bump = make_bump(1);
  const double a = c.alpha;
  const Field u = abs_sine_power(points, kTwoPi, a);
  const std::size_t stride = std::max<std::size_t>(1, points / 4096);
  std::vector<double> coarse;
  for (std::size_t i = 0; i < points; i += stride) {
    coarse.push_back(u.values[i]);
  }
  const double semi = gagliardo_seminorm(coarse, u.spacing() * static_cast<double>(stride), FracOrder(a));
  const double cphi = c_phi(bump, a);
  report.add_row(label("alpha", a), 0, "seminorm_estimate", semi);
  report.add_row(label("alpha", a), 0, "c_phi", cphi);
  const Field smooth = sample_periodic_1d(PeriodicGrid{kTwoPi, points, 1},
                                          [](double x) { return std::sin(x); });
  const std::string param = label("alpha", a);
  bool bound_ok = true;
  std::string worst;
  for (const int n : n_list_or(c, {8, 16, 32, 64, 128})) {
    const ScaledKernel kernel{bump, n, 0.0};
    const Field m = mollify(u, kernel);
    double err = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      err = std::max(err, std::abs(m.values[i] - u.values[i]));
    }
    const double bound = semi * cphi * std::pow(static_cast<double>(n), -a);
    report.add_row(param, n, "sup_error", err);
    report.add_row(param, n, "bound", bound);
    if (!(err <= bound)) {
      bound_ok = false;
      worst = "n=" + std::to_string(n) + ": " + fmt("%.6g", err) + " > " + fmt("%.6g", bound);
    }
    const Field ms = mollify(smooth, kernel);
    double es = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      es = std::max(es, std::abs(ms.values[i] - smooth.values[i]));
    }
    report.add_row("f=sin", n, "sup_error", es);
    if (c.gamma > 0.0) {
      const Field mg = mollify(u, ScaledKernel{bump, n, c.gamma});
      double eg = 0.0;
      for (std::size_t i = 0; i < points; ++i) {
        eg = std::max(eg, std::abs(mg.values[i] - u.values[i]));
      }
      report.add_row(param + ";" + label("gamma", c.gamma), n, "sup_error", eg);
    }
  }
  report.add_check("holder_bound", bound_ok, bound_ok ? "sup error below seminorm * C_phi * n^-alpha" : worst);
  check_slope(report, "holder_rate", param, "sup_error", -a, 0.2);
  check_slope(report, "smooth_rate", "f=sin", "sup_error", -2.0, 0.3);
  return report;
}

ExperimentReport run_mse(const RunConfig& c) {
  if (c.replicates < 100) {
    throw ConfigError("replicates", "\"replicates\" must be >= 100 for the mse experiment");
  }
  ExperimentReport report;
  const std::size_t points = points_or(c, 1024);
  const Field u = sample_periodic_1d(PeriodicGrid{kTwoPi, points, 1},
                                     [](double x) { return std::sin(x) + 0.5 * std::cos(3.0 * x); });
  const std::array<double, 1> x{1.0};
  const std::size_t index = nearest_index(u, x);
  const Mollifier bump = make_bump(1);
  bool additive = true;
  std::string detail = "all |mse - bias^2 - variance| within 3 SE";
  const std::vector<int> ns = n_list_or(c, {4, 8, 16, 32});
  for (const double sigma : {0.5 * c.sigma, c.sigma, 2.0 * c.sigma}) {
    const std::string param = label("sigma", sigma);
    const NoiseModel noise{sigma, c.seed, NoiseKind::white_noise_measure};
    for (const int n : ns) {
      const MseDecomposition d =
          mse_decomposition(u, index, ScaledKernel{bump, n, 0.0}, noise, c.replicates, c.workers);
      const double gap = std::abs(d.mse - d.bias_sq - d.variance);
      report.add_row(param, n, "bias_sq", d.bias_sq);
      report.add_row(param, n, "variance", d.variance, d.variance_se);
      report.add_row(param, n, "mse", d.mse, d.mse_se);
      report.add_row(param, n, "additivity_gap", gap, d.mse_se);
      if (!(gap <= 3.0 * d.mse_se)) {
        additive = false;
        detail = param + ", n=" + std::to_string(n) + ": gap " + fmt("%.3g", gap) + " > 3 SE " +
                 fmt("%.3g", 3.0 * d.mse_se);
      }
    }
  }
  report.add_check("mse_additivity", additive, detail);
  const std::string main = label("sigma", c.sigma);
  report.add_check("bias_decreasing", strictly_decreasing(report.values(main, "bias_sq")),
                   "bias^2 strictly decreasing in n at " + main);
  if (c.sigma > 0.0) {
    check_slope(report, "variance_growth", main, "variance", 1.0, 0.3);
  }
  const std::vector<double> mses = report.values(main, "mse");
  const auto best = std::min_element(mses.begin(), mses.end()) - mses.begin();
  report.add_row(main, 0, "argmin_n_mse", ns[static_cast<std::size_t>(best)]);
  if (c.gamma > 0.0) {
    const NoiseModel noise{c.sigma, c.seed, NoiseKind::white_noise_measure};
    const std::string gparam = main + ";" + label("gamma", c.gamma);
    for (const int n : ns) {
      const MseDecomposition d =
          mse_decomposition(u, index, ScaledKernel{bump, n, c.gamma}, noise, c.replicates, c.workers);
      report.add_row(gparam, n, "bias_sq", d.bias_sq);
      report.add_row(gparam, n, "variance", d.variance, d.variance_se);
      report.add_row(gparam, n, "mse", d.mse, d.mse_se);
    }
  }
  return report;
}

double sine_amplitude(const Field& u, int k) {
  CompensatedSum sum;
  const double w = kTwoPi / u.length;
  for (std::size_t i = 0; i < u.points; ++i) {
    sum.add(u.values[i] * std::sin(k * w * u.coord(i)));
  }
  return 2.0 * sum.value() / static_cast<double>(u.points);
}

ExperimentReport run_burgers(const RunConfig& c) {
  ExperimentReport report;
  const std::size_t points = points_or(c, 32);
  const PeriodicGrid grid{kTwoPi, points, 1};
  const FracFlowParams flow{c.alpha, c.s, c.nu, c.sigma_f};
  const std::size_t steps = c.steps == 0 ? 512 : c.steps;
  const TimeGrid t_grid{0.0, c.t1, steps};
  const int modes = static_cast<int>(std::min<std::size_t>(8, points / 4));
  const Field u0 = synth_velocity(SpectrumSpec{2.0, modes, c.seed}, grid);
  Diagnostics diag;
  const Trajectory traj = frac_burgers_solve(u0, flow, grid, t_grid, c.seed, {}, &diag);
  const std::string param = label("alpha", c.alpha) + ";" + label("s", c.s);
  const std::size_t every = std::max<std::size_t>(1, steps / 16);
  std::vector<Field> kept;
  for (std::size_t i = 0; i < traj.snapshots.size(); i += every) {
    const Field& f = traj.snapshots[i];
    CompensatedSum energy;
    for (const double v : f.values) {
      energy.add(0.5 * v * v * f.spacing());
    }
    report.add_row(param, traj.times[i], "energy", energy.value());
    report.add_row(param, traj.times[i], "dissipation", energy_dissipation(f, flow));
    kept.push_back(f);
  }
  report.add_row(param, 0, "step_ratio", burgers_step_ratio(flow, grid, t_grid));

  // Linear relaxation of one mode against the Mittag-Leffler solution.
  const int k = 2;
  const FracFlowParams linear{c.alpha, c.s, c.nu, 0.0};
  const TimeGrid oracle_grid{0.0, c.t1, 256};
  const Field mode = sample_periodic_1d(grid, [&](double x) { return std::sin(k * x); });
  const Trajectory relax = frac_burgers_solve(mode, linear, grid, oracle_grid, c.seed, {false});
  const double amp = sine_amplitude(relax.snapshots.back(), k);
  const double exact = mittag_leffler(
      c.alpha, -c.nu * std::pow(static_cast<double>(k), 2.0 * c.s) * std::pow(c.t1, c.alpha));
  report.add_row(param, 256, "linear_amplitude", amp);
  report.add_row(param, 256, "mittag_leffler", exact);
  report.add_check("mittag_leffler_oracle", std::abs(amp - exact) <= 1e-3,
                   "|amplitude - E_alpha| = " + fmt("%.3g", std::abs(amp - exact)));

  const Field zero = with_values(mode, std::vector<double>(points, 0.0));
  const Trajectory still = frac_burgers_solve(zero, linear, grid, oracle_grid, c.seed);
  double drift = 0.0;
  for (const Field& f : still.snapshots) {
    for (const double v : f.values) {
      drift = std::max(drift, std::abs(v));
    }
  }
  report.add_check("zero_fixed_point", drift == 0.0, "max |u| = " + fmt("%.3g", drift));

  if (!c.out_dir.empty()) {
    std::filesystem::create_directories(c.out_dir);
    write_field_csv((std::filesystem::path(c.out_dir) / "burgers_final.csv").string(),
                    traj.snapshots.back());
    write_field_binary((std::filesystem::path(c.out_dir) / "burgers_snapshots.bin").string(), kept);
  }
  return report;
}

ExperimentReport run_dissipation(const RunConfig& c) {
  const std::size_t points = points_or(c, 2048);
  const PeriodicGrid grid{kTwoPi, points, 1};
  const FracFlowParams flow{c.alpha, c.s, c.nu, 0.0};
  const Field u = synth_velocity(SpectrumSpec{6.0, 4, c.seed}, grid);
  const NoiseModel noise{c.sigma, c.seed, NoiseKind::white_noise_measure};
  ExperimentReport report =
      dissipation_convergence(u, flow, n_list_or(c, {8, 16, 32, 64}), noise, c.replicates, c.workers);
  report.add_check("expectation_decreasing",
                   strictly_decreasing(report.values("", "abs_err_expectation")),
                   "|E[eps_n] - eps| strictly decreasing in n");
  const int k = 3;
  const Field single = sample_periodic_1d(grid, [&](double x) { return std::sin(k * x); });
  const double eps = energy_dissipation(single, flow);
  const double exact = c.nu * std::pow(static_cast<double>(k), 2.0 * c.s) * std::numbers::pi;
  report.add_row("f=sin(3x)", 0, "eps_single_mode", eps);
  report.add_row("f=sin(3x)", 0, "eps_single_mode_exact", exact);
  report.add_check("single_mode_exact", std::abs(eps - exact) <= 1e-8,
                   "|eps - nu k^{2s} pi| = " + fmt("%.3g", std::abs(eps - exact)));
  return report;
}

ExperimentReport run_l2(const RunConfig& c) {
  ExperimentReport report;
  const std::size_t points = points_or(c, 65536);
  const std::vector<int> ns = n_list_or(c, {8, 16, 32, 64});
  const Field smooth = sample_periodic_1d(PeriodicGrid{kTwoPi, points, 1}, [](double x) {
    return std::sin(x) + 0.5 * std::cos(2.0 * x);
  });
  const std::string holder_param = "weierstrass;" + label("alpha", c.alpha);
  for (const auto& [param, field] :
       {std::pair<std::string, Field>{"smooth", smooth},
        std::pair<std::string, Field>{holder_param, weierstrass_field(points, c.alpha)}}) {
    for (ReportRow row : l2_convergence(field, ns).rows) {
      row.param = param;
      report.rows.push_back(std::move(row));
    }
  }
  check_slope(report, "smooth_rate", "smooth", "l2_error", -2.0, 0.3);
  check_slope(report, "holder_rate", holder_param, "l2_error", -c.alpha, 0.2);
  return report;
}

template <typename T>
T get_number(const json& v, const std::string& key) {
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      throw ConfigError(key, "\"" + key + "\" must be an integer");
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned()) {
        return v.get<T>();
      }
      if (v.get<long long>() < 0) {
        throw ConfigError(key, "\"" + key + "\" must be nonnegative");
      }
    }
    return v.get<T>();
  } else {
    if (!v.is_number()) {
      throw ConfigError(key, "\"" + key + "\" must be a number");
    }
    return v.get<T>();
  }
}

std::vector<int> parse_n_list(const json& v) {
  std::vector<int> out;
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stoi(item, &used));
        if (used != item.size()) {
          throw std::invalid_argument(item);
        }
      } catch (const std::exception&) {
        throw ConfigError("n_list", "\"n_list\" entry \"" + item + "\" is not an integer");
      }
    }
    return out;
  }
  if (!v.is_array()) {
    throw ConfigError("n_list", "\"n_list\" must be an array of integers or \"8,16,32\"");
  }
  for (const json& e : v) {
    out.push_back(get_number<int>(e, "n_list"));
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) {
    throw ConfigError(key, "\"" + key + "\" " + what);
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "kernel",          "caputo", "kantorovich_rates", "variance_scaling", "voronovskaya",
      "mollifier_rates", "mse",    "burgers",           "dissipation",      "l2"};
  return names;
}

std::string experiment_name(Experiment e) {
  return experiment_names().at(static_cast<std::size_t>(e));
}

Experiment parse_experiment(const std::string& name) {
  const auto& names = experiment_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw ConfigError("experiment", "unknown experiment \"" + name + "\" (key \"experiment\")");
  }
  return static_cast<Experiment>(it - names.begin());
}

void RunConfig::validate() const {
  require(q > 0.0 && std::isfinite(q), "q", "must be positive");
  require(lambda > 0.0 && std::isfinite(lambda), "lambda", "must be positive");
  require(K >= 1 && K <= 100000, "K", "must lie in [1, 100000]");
  require(alpha > 0.0 && alpha < 1.0, "alpha", "must lie strictly inside (0, 1)");
  require(s > 0.0 && s <= 1.5, "s", "must lie in (0, 1.5]");
  require(nu > 0.0 && std::isfinite(nu), "nu", "must be positive");
  require(sigma_f >= 0.0 && std::isfinite(sigma_f), "sigma_f", "must be >= 0");
  require(steps == 0 || steps >= 2, "steps", "must be >= 2");
  require(t1 > 0.0 && std::isfinite(t1), "t1", "must be positive");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= 1, "n_list", "entries must be >= 1");
    require(i == 0 || n_list[i] > n_list[i - 1], "n_list", "must be strictly increasing");
  }
  require(dim == 1 || dim == 2, "dim", "must be 1 or 2");
  require(points == 0 || (points >= 8 && fft::is_power_of_two(points)), "points",
          "must be a power of two >= 8");
  require(gamma >= 0.0 && std::isfinite(gamma), "gamma", "must be >= 0");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma", "must be >= 0");
  require(replicates >= 2, "replicates", "must be >= 2");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("", "config must be a flat JSON object");
  }
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") {
      require(v.is_string(), key, "must be a string");
      c.experiment = parse_experiment(v.get<std::string>());
    } else if (key == "q") {
      c.q = get_number<double>(v, key);
    } else if (key == "lambda") {
      c.lambda = get_number<double>(v, key);
    } else if (key == "K") {
      c.K = get_number<int>(v, key);
    } else if (key == "alpha") {
      c.alpha = get_number<double>(v, key);
    } else if (key == "s") {
      c.s = get_number<double>(v, key);
    } else if (key == "nu") {
      c.nu = get_number<double>(v, key);
    } else if (key == "sigma_f") {
      c.sigma_f = get_number<double>(v, key);
    } else if (key == "steps") {
      c.steps = get_number<std::size_t>(v, key);
    } else if (key == "t1") {
      c.t1 = get_number<double>(v, key);
    } else if (key == "n_list") {
      c.n_list = parse_n_list(v);
    } else if (key == "dim") {
      c.dim = get_number<int>(v, key);
    } else if (key == "points") {
      c.points = get_number<std::size_t>(v, key);
    } else if (key == "gamma") {
      c.gamma = get_number<double>(v, key);
    } else if (key == "sigma") {
      c.sigma = get_number<double>(v, key);
    } else if (key == "seed") {
      c.seed = get_number<std::uint64_t>(v, key);
    } else if (key == "kind") {
      require(v.is_string(), key, "must be a string");
      const std::string kind = v.get<std::string>();
      if (kind == "cell_multiplier") {
        c.kind = NoiseKind::cell_multiplier;
      } else if (kind == "white_noise" || kind == "white_noise_measure") {
        c.kind = NoiseKind::white_noise_measure;
      } else {
        throw ConfigError(key, "\"kind\" must be \"cell_multiplier\" or \"white_noise\"");
      }
    } else if (key == "replicates") {
      c.replicates = get_number<std::size_t>(v, key);
    } else if (key == "out") {
      require(v.is_string(), key, "must be a string");
      c.out_dir = v.get<std::string>();
    } else if (key == "svg") {
      require(v.is_boolean(), key, "must be true or false");
      c.svg = v.get<bool>();
    } else if (key == "workers") {
      c.workers = get_number<unsigned>(v, key);
    } else {
      throw ConfigError(key, "unknown config key \"" + key + "\"");
    }
  }
  c.validate();
  return c;
}

RunConfig parse_config_text(const std::string& text, const json& overrides) {
  json j = json::object();
  if (!text.empty()) {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("malformed JSON config: ") + e.what());
    }
    if (!j.is_object()) {
      throw ConfigError("", "config must be a flat JSON object");
    }
  }
  if (!overrides.is_null()) {
    if (!overrides.is_object()) {
      throw ConfigError("", "overrides must be a JSON object");
    }
    for (const auto& [key, v] : overrides.items()) {
      j[key] = v;
    }
  }
  return config_from_json(j);
}

RunConfig parse_config(const std::string& path, const json& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw ConfigError("config", "cannot read config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config_text(text, overrides);
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["experiment"] = experiment_name(c.experiment);
  j["q"] = c.q;
  j["lambda"] = c.lambda;
  j["K"] = c.K;
  j["alpha"] = c.alpha;
  j["s"] = c.s;
  j["nu"] = c.nu;
  j["sigma_f"] = c.sigma_f;
  j["steps"] = c.steps;
  j["t1"] = c.t1;
  j["n_list"] = c.n_list;
  j["dim"] = c.dim;
  j["points"] = c.points;
  j["gamma"] = c.gamma;
  j["sigma"] = c.sigma;
  j["seed"] = c.seed;
  if (c.kind) {
    j["kind"] = *c.kind == NoiseKind::cell_multiplier ? "cell_multiplier" : "white_noise";
  }
  j["replicates"] = c.replicates;
  return j;
}

ExperimentReport run(const RunConfig& config) {
  config.validate();
  ExperimentReport report;
  switch (config.experiment) {
    case Experiment::kernel: report = run_kernel(config); break;
    case Experiment::caputo: report = run_caputo(config); break;
    case Experiment::kantorovich_rates: report = run_kantorovich_rates(config); break;
    case Experiment::variance_scaling: report = run_variance_scaling(config); break;
    case Experiment::voronovskaya: report = run_voronovskaya(config); break;
    case Experiment::mollifier_rates: report = run_mollifier_rates(config); break;
    case Experiment::mse: report = run_mse(config); break;
    case Experiment::burgers: report = run_burgers(config); break;
    case Experiment::dissipation: report = run_dissipation(config); break;
    case Experiment::l2: report = run_l2(config); break;
  }
  report.experiment = experiment_name(config.experiment);
  report.config_echo = config_to_json(config);
  report.add_row("config", 0, "seed", static_cast<double>(config.seed));
  report.add_row("config", 0, "replicates", static_cast<double>(config.replicates));
  if (!config.out_dir.empty()) {
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    write_text_file((dir / (report.experiment + ".csv")).string(), report_to_csv(report));
    write_text_file((dir / (report.experiment + "_config.json")).string(),
                    report.config_echo.dump(2) + "\n");
    if (config.svg) {
      write_text_file((dir / (report.experiment + ".svg")).string(), report_to_svg(report));
    }
  }
  return report;
}

Field abs_sine_power(std::size_t points, double length, double alpha) {
  const double w = kTwoPi / length;
  return sample_periodic_1d(PeriodicGrid{length, points, 1},
                            [&](double x) { return std::pow(std::abs(std::sin(w * x)), alpha); });
}

Field weierstrass_field(std::size_t points, double alpha) {
  int top = 0;
  while ((std::size_t{1} << (top + 1)) <= points / 4) {
    ++top;
  }
  return sample_periodic_1d(PeriodicGrid{kTwoPi, points, 1}, [&](double x) {
    CompensatedSum sum;
    for (int j = 0; j <= top; ++j) {
      const double f = std::ldexp(1.0, j);
      sum.add(std::pow(f, -alpha) * std::cos(f * x));
    }
    return sum.value();
  });
}

}  // namespace fraclab
