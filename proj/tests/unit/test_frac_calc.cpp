#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fraclab/frac_calc.hpp"
#include "fraclab/stats.hpp"

using namespace fraclab;

namespace {
std::vector<double> sample_t(const TimeGrid& g, double p) {
  std::vector<double> f(g.nodes());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(g.node(i), p);
  return f;
}
}  // namespace

TEST_CASE("fractional order bounds") {
  CHECK_THROWS_AS(FracOrder(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FracOrder(1.0), std::invalid_argument);
  CHECK(FracOrder(0.4).value() == 0.4);
}

TEST_CASE("gamma") {
  CHECK(gamma_fn(1) == 1.0);
  CHECK(gamma_fn(5) == 24.0);
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_fn(0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_fn(-1.5), std::invalid_argument);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.01, 30);
  for (int i = 0; i < 500; ++i) {
    const double x = ux(rng);
    CHECK(std::abs(gamma_fn(x) / std::tgamma(x) - 1) < 1e-12);
    // Recursion identity.
    CHECK(std::abs(gamma_fn(x + 1) / (x * gamma_fn(x)) - 1) < 1e-12);
  }
  CHECK(log_gamma_fn(100.5) == doctest::Approx(std::lgamma(100.5)).epsilon(1e-13));
}

TEST_CASE("Mittag-Leffler") {
  CHECK(mittag_leffler(0.3, 0.0) == 1.0);
  CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-12));
  // Second summation order: plain reversed series.
  double reversed = 0;
  for (int j = 120; j >= 0; --j) reversed += std::pow(-1.0, j) / std::tgamma(0.5 * j + 1);
  CHECK(std::abs(mittag_leffler(0.5, -1.0) - reversed) < 1e-13);
  CHECK(std::abs(mittag_leffler(0.999, -1.0) - std::exp(-1.0)) < 1e-3);
  for (int i = 0; i <= 50; ++i) {
    const double z = -0.1 * i;
    // Near alpha = 1 the function itself differs from e^z by about 1e-6 * |dE/dalpha|.
    CHECK(std::abs(mittag_leffler(1 - 1e-6, z) - std::exp(z)) < 1e-6);
    CHECK(std::abs(mittag_leffler(1.0, z) - std::exp(z)) < 1e-8);
  }
  CHECK_THROWS_AS(mittag_leffler(0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(mittag_leffler(0.5, -200.0), std::domain_error);
}

TEST_CASE("Caputo L1 examples") {
  const TimeGrid g{0, 1, 256};
  const FracOrder a(0.5);
  std::vector<double> seven(g.nodes(), 7.0);
  for (const double d : caputo_l1(seven, g, a)) CHECK(d == 0.0);
  const auto lin = caputo_l1(sample_t(g, 1), g, a);
  CHECK(lin[0] == 0.0);
  CHECK(lin.back() == doctest::Approx(1 / gamma_fn(1.5)).epsilon(1e-13));
  CHECK(lin.back() == doctest::Approx(1.1283792).epsilon(1e-7));
  const TimeGrid fine{0, 1, 4096};
  const auto quad = caputo_l1(sample_t(fine, 2), fine, a);
  CHECK(std::abs(quad.back() - 2 / gamma_fn(2.5)) < 1e-4);
  CHECK(2 / gamma_fn(2.5) == doctest::Approx(1.5045055).epsilon(1e-7));
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(caputo_l1(one, TimeGrid{0, 1, 2}, a), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({1, 0, 4}).validate(), std::invalid_argument);
}

TEST_CASE("Caputo L1 order on t^2") {
  for (const double alpha : {0.3, 0.5, 0.7}) {
    std::vector<double> steps, errs;
    for (std::size_t m = 64; m <= 1024; m *= 2) {
      const TimeGrid g{0, 1, m};
      const auto d = caputo_l1(sample_t(g, 2), g, FracOrder(alpha));
      double err = 0;
      for (std::size_t i = 1; i < d.size(); ++i) {
        const double t = g.node(i);
        err = std::max(err, std::abs(d[i] - 2 * std::pow(t, 2 - alpha) / gamma_fn(3 - alpha)));
      }
      steps.push_back(static_cast<double>(m));
      errs.push_back(err);
    }
    const SlopeEstimate fit = fit_slope(steps, errs);
    CHECK(std::abs(fit.slope + (2 - alpha)) < 0.2);
  }
}

TEST_CASE("Gagliardo seminorm") {
  const std::vector<double> c(50, 3.0);
  CHECK(gagliardo_seminorm(c, 0.1, FracOrder(0.5)) == 0.0);
  const Field lin = sample_box_1d(0, 1, 101, [](double x) { return x; });
  CHECK(gagliardo_seminorm(lin, FracOrder(0.5)) == doctest::Approx(1.0).epsilon(1e-14));
  const Field root = sample_box_1d(-1, 1, 201, [](double x) { return std::sqrt(std::abs(x)); });
  CHECK(gagliardo_seminorm(root, FracOrder(0.5)) >= 1.0);
  std::vector<double> f(80), scaled(80);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = n01(rng);
    scaled[i] = -4 * f[i];
  }
  CHECK(gagliardo_seminorm(scaled, 0.01, FracOrder(0.3)) ==
        4 * gagliardo_seminorm(f, 0.01, FracOrder(0.3)));
}

TEST_CASE("fractional Sobolev norm") {
  const TimeGrid g{0, 1, 256};
  const FracOrder a(0.5);
  CHECK(frac_sobolev_norm(std::vector<double>(g.nodes(), -2.5), g, a) == 2.5);
  CHECK(frac_sobolev_norm(sample_t(g, 1), g, a) == doctest::Approx(2.1283792).epsilon(1e-7));
  const TimeGrid fine{0, 1, 4096};
  CHECK(std::abs(frac_sobolev_norm(sample_t(fine, 2), fine, a) - 2.5045055) < 1e-4);
}

TEST_CASE("fractional Laplacian") {
  const double two_pi = 2 * std::numbers::pi;
  const PeriodicGrid g{two_pi, 64, 1};
  const Field s3 = sample_periodic_1d(g, [](double x) { return std::sin(3 * x); });
  const Field l = frac_laplacian(s3, 0.7);
  for (std::size_t i = 0; i < l.size(); ++i) {
    CHECK(std::abs(l.values[i] - std::pow(3.0, 1.4) * s3.values[i]) < 1e-10);
  }
  const Field c = sample_periodic_1d(g, [](double) { return 4.2; });
  for (const double v : frac_laplacian(c, 0.3).values) CHECK(std::abs(v) < 1e-12);
  const Field two = sample_periodic_1d(g, [](double x) { return std::sin(x) + std::sin(4 * x); });
  const Field l2 = frac_laplacian(two, 0.5);
  for (std::size_t i = 0; i < l2.size(); ++i) {
    const double x = g.spacing() * static_cast<double>(i);
    CHECK(std::abs(l2.values[i] - (std::sin(x) + 4 * std::sin(4 * x))) < 1e-10);
  }
  // s = 1 against the second derivative.
  const Field smooth = sample_periodic_1d(g, [](double x) { return std::exp(std::sin(x)); });
  const Field lap = frac_laplacian(smooth, 1.0);
  for (std::size_t i = 0; i < lap.size(); ++i) {
    const double x = g.spacing() * static_cast<double>(i);
    const double d2 = std::exp(std::sin(x)) * (std::cos(x) * std::cos(x) - std::sin(x));
    CHECK(std::abs(lap.values[i] + d2) < 1e-10);
  }
  const Field a = frac_laplacian(frac_laplacian(smooth, 0.3), 0.45);
  const Field b = frac_laplacian(smooth, 0.75);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-10);
}

TEST_CASE("fractional Laplacian in two dimensions and rejections") {
  const PeriodicGrid g{2 * std::numbers::pi, 32, 2};
  const Field u = sample_periodic(g, [](std::span<const double> x) {
    return std::sin(2 * x[0]) * std::cos(x[1]);
  });
  const Field l = frac_laplacian(u, 0.6);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(std::abs(l.values[i] - std::pow(5.0, 0.6) * u.values[i]) < 1e-10);
  }
  const Field boxed = sample_box_1d(0, 1, 16, [](double x) { return x; });
  CHECK_THROWS_AS(frac_laplacian(boxed, 0.5), std::invalid_argument);
  Field odd = sample_periodic_1d({1.0, 16, 1}, [](double x) { return x; });
  odd.points = 12;
  odd.values.resize(12);
  CHECK_THROWS_AS(frac_laplacian(odd, 0.5), std::invalid_argument);
}
