#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "doctest.h"
#include "fraclab/kantorovich.hpp"
#include "fraclab/stats.hpp"

using namespace fraclab;

namespace {
GridSpec grid1(int n) {
  GridSpec g;
  g.n = n;
  return g;
}

GridSpec grid2(int n) {
  GridSpec g;
  g.n = n;
  g.dim = 2;
  g.eval_box = Box{{0, 0}, {1, 1}};
  return g;
}

NoiseModel noise(double sigma, std::uint64_t seed = 42) {
  NoiseModel m;
  m.sigma = sigma;
  m.base_seed = seed;
  return m;
}
}  // namespace

TEST_CASE("cell averages") {
  const GridSpec g = grid1(10);
  const std::int64_t k[1] = {3};
  CHECK(cell_average([](std::span<const double>) { return 2.5; }, k, g) ==
        doctest::Approx(2.5).epsilon(1e-15));
  CHECK(cell_average([](std::span<const double> t) { return t[0]; }, k, g) ==
        doctest::Approx(0.35).epsilon(1e-15));
  // (b^3 - a^3) / (3 (b - a)) on [0.3, 0.4].
  const double exact = (0.064 - 0.027) / 0.3;
  CHECK(std::abs(cell_average([](std::span<const double> t) { return t[0] * t[0]; }, k, g) -
                 exact) < 1e-14);
  const GridSpec g2 = grid2(4);
  const std::int64_t k2[2] = {1, -2};
  CHECK(cell_average([](std::span<const double> t) { return t[0] * t[1]; }, k2, g2) ==
        doctest::Approx(0.375 * -0.375).epsilon(1e-14));
}

TEST_CASE("expectation reproduces constants and matches a brute-force lattice") {
  const KernelParams p;
  const double x[1] = {0.37};
  CHECK(std::abs(apply_expectation([](std::span<const double>) { return 3.0; }, x, grid1(16), p) -
                 3.0) < 1e-10);
  const int n = 100;
  double brute = 0;
  for (int k = 37 - 200; k <= 37 + 200; ++k) {
    brute += (k + 0.5) / n * eval_Phi(p, n * 0.37 - k);
  }
  const double got = apply_expectation([](std::span<const double> t) { return t[0]; }, x, grid1(n), p);
  CHECK(std::abs(got - brute) < 1e-12);
  CHECK(std::abs(got - 0.37) < 1.0 / n);
}

TEST_CASE("sine error decreases with n") {
  const KernelParams p;
  const ScalarFn f = [](std::span<const double> t) { return std::sin(t[0]); };
  double prev = 1e9;
  for (const int n : {8, 16, 32, 64}) {
    double err = 0;
    for (int i = 0; i <= 20; ++i) {
      const double x[1] = {0.05 * i};
      err = std::max(err, std::abs(apply_expectation(f, x, grid1(n), p) - std::sin(x[0])));
    }
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("noisy samples") {
  const KernelParams p;
  const ScalarFn f = [](std::span<const double> t) { return 1 + std::cos(3 * t[0]); };
  const double x[1] = {0.41};
  const GridSpec g = grid1(16);
  CHECK(sample(f, x, g, p, noise(0.0), 5) == apply_expectation(f, x, g, p));
  CHECK(sample(f, x, g, p, noise(0.3), 5) == sample(f, x, g, p, noise(0.3), 5));
  CHECK(sample(f, x, g, p, noise(0.3), 5) != sample(f, x, g, p, noise(0.3), 6));
  NoiseModel wrong = noise(0.3);
  wrong.kind = NoiseKind::white_noise_measure;
  CHECK_THROWS_AS(sample(f, x, g, p, wrong, 0), std::invalid_argument);
  CHECK_THROWS_AS(noise(-1).validate(), std::invalid_argument);
}

TEST_CASE("Monte Carlo mean and variance match the closed forms") {
  const KernelParams p;
  const ScalarFn f = [](std::span<const double> t) { return 2 + std::sin(5 * t[0]); };
  const double x[1] = {0.63};
  for (const int n : {8, 32}) {
    const KantorovichStencil st(f, x, grid1(n), p);
    std::vector<double> draws(10000);
    for (std::size_t r = 0; r < draws.size(); ++r) draws[r] = st.sample(noise(0.2, 7), r);
    const SampleMoments m = sample_moments(draws);
    CHECK(std::abs(m.mean - st.expectation()) <= 3 * m.mean_se);
    CHECK(std::abs(m.variance - st.variance(0.2)) <= 3 * m.variance_se);
  }
}

TEST_CASE("closed-form variance") {
  const KernelParams p;
  const double x[1] = {0.2};
  const ScalarFn one = [](std::span<const double>) { return 1.0; };
  CHECK(variance_closed_form(one, x, grid1(8), p, 0.0) == 0.0);
  double z2 = 0;
  for (int k = 2 - 60; k <= 2 + 60; ++k) {
    const double z = eval_Phi(p, 8 * 0.2 - k);
    z2 += z * z;
  }
  CHECK(variance_closed_form(one, x, grid1(8), p, 0.5) == doctest::Approx(0.25 * z2).epsilon(1e-12));
  CHECK_THROWS_AS(variance_closed_form(one, x, grid1(8), p, -0.1), std::invalid_argument);
}

TEST_CASE("kernel moments") {
  const KernelParams p;
  const double mid[1] = {0.5};
  CHECK(std::abs(kernel_moment({{0}}, mid, grid1(10), p) - 1) < 1e-10);
  CHECK(std::abs(kernel_moment({{1}}, mid, grid1(10), p) - 0.05) < 1e-10);
  const double off[1] = {0.123};
  CHECK(kernel_moment({{2}}, off, grid1(10), p) > 0);
  CHECK_THROWS_AS(kernel_moment({{1, 0}}, off, grid1(10), p), std::invalid_argument);
}

TEST_CASE("kernel moments agree with quadrature on random cases") {
  const KernelParams p;
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> ub(0, 3), un(2, 40), dimd(1, 2);
  std::uniform_real_distribution<double> ux(-1, 1);
  for (int c = 0; c < 20; ++c) {
    const int dim = dimd(rng);
    const int n = un(rng);
    MultiIndex beta;
    std::vector<double> x;
    for (int d = 0; d < dim; ++d) {
      beta.beta.push_back(ub(rng));
      x.push_back(ux(rng));
    }
    GridSpec g = dim == 1 ? grid1(n) : grid2(n);
    const ScalarFn mono = [&](std::span<const double> t) {
      double v = 1;
      for (int d = 0; d < dim; ++d) v *= std::pow(t[d] - x[d], beta.beta[d]);
      return v;
    };
    CHECK(std::abs(kernel_moment(beta, x, g, p) - apply_expectation(mono, x, g, p)) < 1e-10);
  }
}

TEST_CASE("multi-index helpers") {
  CHECK(multi_indices(1, 2).size() == 2);
  CHECK(multi_indices(2, 2).size() == 5);
  CHECK(multi_indices(3, 2).size() == 9);
  const MultiIndex b{{2, 3}};
  CHECK(b.order() == 5);
  CHECK(b.factorial() == 12.0);
}

TEST_CASE("Voronovskaya remainder") {
  const KernelParams p;
  const SmoothFn lin{
      [](std::span<const double> t) { return 2 * t[0] - 1; },
      [](std::span<const double>, std::span<const int> b) { return b[0] == 1 ? 2.0 : 0.0; }};
  const SmoothFn sq{
      [](std::span<const double> t) { return t[0] * t[0]; },
      [](std::span<const double> t, std::span<const int> b) {
        return b[0] == 1 ? 2 * t[0] : b[0] == 2 ? 2.0 : 0.0;
      }};
  const double x[1] = {0.37};
  for (const int n : {8, 32}) {
    CHECK(std::abs(voronovskaya_remainder(lin, x, grid1(n), p, 1)) < 1e-10);
    CHECK(std::abs(voronovskaya_remainder(sq, x, grid1(n), p, 2)) < 1e-10);
  }
  const SmoothFn sq2{
      [](std::span<const double> t) { return t[0] * t[1] + t[1] * t[1]; },
      [](std::span<const double> t, std::span<const int> b) {
        if (b[0] == 1 && b[1] == 0) return t[1];
        if (b[0] == 0 && b[1] == 1) return t[0] + 2 * t[1];
        if (b[0] == 1 && b[1] == 1) return 1.0;
        if (b[0] == 0 && b[1] == 2) return 2.0;
        return 0.0;
      }};
  const double x2[2] = {0.37, 0.61};
  CHECK(std::abs(voronovskaya_remainder(sq2, x2, grid2(16), p, 2)) < 1e-10);

  const SmoothFn sine{
      [](std::span<const double> t) { return std::sin(t[0]); },
      [](std::span<const double> t, std::span<const int> b) {
        switch (b[0] % 4) {
          case 0: return std::sin(t[0]);
          case 1: return std::cos(t[0]);
          case 2: return -std::sin(t[0]);
          default: return -std::cos(t[0]);
        }
      }};
  std::vector<double> ns, r1, r2;
  for (const int n : {8, 16, 32, 64}) {
    ns.push_back(n);
    r1.push_back(std::abs(voronovskaya_remainder(sine, x, grid1(n), p, 1)));
    r2.push_back(std::abs(voronovskaya_remainder(sine, x, grid1(n), p, 2)));
  }
  CHECK(fit_slope(ns, r2).slope < fit_slope(ns, r1).slope);
}

TEST_CASE("linearity and lattice shift") {
  const KernelParams p;
  const ScalarFn f = [](std::span<const double> t) { return std::exp(t[0]); };
  const ScalarFn g = [](std::span<const double> t) { return std::cos(2 * t[0]); };
  const ScalarFn comb = [&](std::span<const double> t) { return 3 * f(t) - 0.5 * g(t); };
  const ScalarFn twice = [&](std::span<const double> t) { return 2 * f(t); };
  const double x[1] = {0.29};
  const GridSpec gs = grid1(24);
  const NoiseModel nm = noise(0.4, 3);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const double lhs = sample(comb, x, gs, p, nm, r);
    const double rhs = 3 * sample(f, x, gs, p, nm, r) - 0.5 * sample(g, x, gs, p, nm, r);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(sample(twice, x, gs, p, nm, r) == 2 * sample(f, x, gs, p, nm, r));
  }
  const double h = 1.0 / 24;
  const ScalarFn shifted = [&](std::span<const double> t) { return std::exp(t[0] - h); };
  const double xs[1] = {0.29 - h};
  CHECK(std::abs(apply_expectation(shifted, x, gs, p) - apply_expectation(f, xs, gs, p)) < 1e-10);
}

TEST_CASE("coarse truncation raises a tail diagnostic") {
  KernelParams p;
  p.lambda = 0.5;
  p.trunc_radius = 2;
  Diagnostics diag;
  const double x[1] = {0.5};
  apply_expectation([](std::span<const double>) { return 1.0; }, x, grid1(8), p, &diag);
  REQUIRE(!diag.empty());
  CHECK(diag[0].code == "lattice_tail");
}
