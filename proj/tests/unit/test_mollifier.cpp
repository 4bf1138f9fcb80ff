#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fraclab/mollifier.hpp"
#include "fraclab/stats.hpp"

using namespace fraclab;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

// Independent trapezoid oracle for integrals of g over (-1, 1).
template <class G>
double trapezoid(G g, int panels = 200000) {
  const double h = 2.0 / panels;
  double s = 0;
  for (int i = 1; i < panels; ++i) s += g(-1 + h * i);
  return s * h;
}

double raw_bump(double x) { return std::abs(x) < 1 ? std::exp(-1 / (1 - x * x)) : 0.0; }

ScaledKernel scaled(int dim, int n, double gamma = 0) {
  return ScaledKernel{make_bump(dim), n, gamma};
}

NoiseModel white(double sigma, std::uint64_t seed = 42) {
  NoiseModel m;
  m.sigma = sigma;
  m.base_seed = seed;
  m.kind = NoiseKind::white_noise_measure;
  return m;
}

Field sine_field(std::size_t points) {
  return sample_periodic_1d({kTwoPi, points, 1}, [](double x) { return std::sin(x); });
}
}  // namespace

TEST_CASE("bump construction") {
  const Mollifier m = make_bump(1);
  const double c = 1 / trapezoid(raw_bump);
  CHECK(m.normalization == doctest::Approx(c).epsilon(1e-10));
  CHECK(m.normalization == doctest::Approx(2.2522836).epsilon(1e-7));
  CHECK(std::abs(m.mass() - 1) < 1e-10);
  CHECK(m.eval_radius(0) == doctest::Approx(m.normalization * std::exp(-1.0)).epsilon(1e-15));
  CHECK(m.eval_radius(0) == doctest::Approx(0.828569).epsilon(1e-6));
  CHECK(m.eval_radius(1) == 0.0);
  const double plus[1] = {1.0}, minus[1] = {-1.0};
  CHECK(m.eval(plus) == 0.0);
  CHECK(m.eval(minus) == 0.0);
  CHECK(m.l2_norm_sq == doctest::Approx(trapezoid([&](double x) {
                                         const double v = c * raw_bump(x);
                                         return v * v;
                                       })).epsilon(1e-9));
  const Mollifier m2 = make_bump(2);
  CHECK(std::abs(m2.mass() - 1) < 1e-10);
  CHECK_THROWS_AS(make_bump(3), std::invalid_argument);
  CHECK_THROWS_AS(make_bump(0), std::invalid_argument);
}

TEST_CASE("scaled kernels keep unit mass") {
  for (const int n : {1, 2, 8, 32}) {
    const ScaledKernel k = scaled(1, n);
    const double mass = trapezoid([&](double y) {
                          const double x[1] = {y / n};
                          return k.eval(x);
                        }) / n;
    CHECK(std::abs(mass - 1) < 1e-8);
  }
  CHECK(scaled(1, 4, 0.5).amplitude() == doctest::Approx(2.0));
  CHECK_THROWS_AS(scaled(1, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(scaled(1, 2, -1).validate(), std::invalid_argument);
}

TEST_CASE("mollification of constants and of a sine") {
  const Field c = sample_periodic_1d({kTwoPi, 512, 1}, [](double) { return 1.7; });
  for (const double v : mollify(c, scaled(1, 8)).values) CHECK(std::abs(v - 1.7) < 1e-12);

  const Field u = sine_field(4096);
  std::vector<double> ns, errs;
  for (const int n : {4, 8, 16, 32}) {
    const Field m = mollify(u, scaled(1, n));
    double err = 0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(m.values[i] - u.values[i]));
    ns.push_back(n);
    errs.push_back(err);
  }
  CHECK(std::abs(fit_slope(ns, errs).slope + 2) < 0.1);
}

TEST_CASE("gamma scaling multiplies the mollification by n^-gamma") {
  const Field u = sine_field(1024);
  const Field a = mollify(u, scaled(1, 16));
  const Field b = mollify(u, scaled(1, 16, 0.5));
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(b.values[i] - a.values[i] / 4) < 1e-12);
}

TEST_CASE("coarse grids and oversized kernels are rejected") {
  const Field u = sine_field(64);  // h ~ 0.098
  CHECK_NOTHROW(mollify(u, scaled(1, 2)));
  CHECK_THROWS_AS(mollify(u, scaled(1, 8)), std::invalid_argument);
  const Field tiny = sample_periodic_1d({0.5, 256, 1}, [](double x) { return x; });
  CHECK_THROWS_AS(mollify(tiny, scaled(1, 2)), std::invalid_argument);
}

TEST_CASE("direct and FFT convolutions agree") {
  const Field u = sample_periodic_1d({kTwoPi, 512, 1}, [](double x) { return std::exp(std::cos(x)); });
  const ScaledKernel k = scaled(1, 8);
  const Field m = mollify(u, k);
  for (std::size_t i = 0; i < u.size(); i += 17) CHECK(std::abs(mollify_at(u, i, k) - m.values[i]) < 1e-12);
  const Field u2 = sample_periodic({kTwoPi, 64, 2}, [](std::span<const double> x) {
    return std::sin(x[0]) * std::cos(2 * x[1]);
  });
  const ScaledKernel k2 = scaled(2, 2);
  const Field m2 = mollify(u2, k2);
  for (std::size_t i = 0; i < u2.size(); i += 97) {
    CHECK(std::abs(mollify_at(u2, i, k2) - m2.values[i]) < 1e-12);
  }
}

TEST_CASE("boxed fields flag the boundary layer") {
  const Field u = sample_box_1d(0, 1, 401, [](double x) { return x * x; });
  const Field m = mollify(u, scaled(1, 8));
  REQUIRE(m.boundary_layer.size() == u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u.coord(i);
    const bool near_edge = x < 1.0 / 8 - 1e-12 || x > 1 - 1.0 / 8 + 1e-12;
    if (near_edge) CHECK(m.boundary_layer[i] == 1);
    if (x > 0.2 && x < 0.8) {
      CHECK(m.boundary_layer[i] == 0);
      // Even kernel: (phi_n * x^2)(x) = x^2 + second moment.
      CHECK(m.values[i] - u.values[i] > 0);
    }
  }
}

TEST_CASE("kernel norms and C_phi") {
  const Mollifier m = make_bump(1);
  CHECK(std::abs(l2_norm_sq_scaled(ScaledKernel{m, 8, 0}) - 8 * m.l2_norm_sq) < 1e-8);
  CHECK(l2_norm_sq_scaled(ScaledKernel{m, 1, 0}) == doctest::Approx(m.l2_norm_sq).epsilon(1e-14));
  CHECK(l2_norm_sq_scaled(ScaledKernel{m, 6, 0}) ==
        doctest::Approx(2 * l2_norm_sq_scaled(ScaledKernel{m, 3, 0})).epsilon(1e-12));
  CHECK(l2_norm_sq_scaled(ScaledKernel{m, 4, 0.5}) ==
        doctest::Approx(m.l2_norm_sq).epsilon(1e-12));

  CHECK(std::abs(c_phi(m, 0.0) - 1) < 1e-10);
  CHECK(std::abs(c_phi(m, FracOrder(1e-6)) - 1) < 1e-5);
  CHECK(c_phi(m, 1.0) < 1);
  CHECK(std::abs(c_phi(m, 0.5, 20) - c_phi(m, 0.5, 30)) < 1e-8);
  const double oracle = trapezoid([&](double w) { return std::sqrt(std::abs(w)) * m.normalization * raw_bump(w); });
  CHECK(std::abs(c_phi(m, FracOrder(0.5)) - oracle) < 1e-6);
  CHECK_THROWS_AS(c_phi(m, -0.5), std::invalid_argument);
}

TEST_CASE("stochastic mollification") {
  const Field u = sample_periodic_1d({kTwoPi, 1024, 1}, [](double x) { return 1 + 0.5 * std::sin(x); });
  const ScaledKernel k = scaled(1, 8);
  CHECK(stochastic_mollify_sample(u, k, white(0.0), 3).values == mollify(u, k).values);
  NoiseModel wrong = white(0.1);
  wrong.kind = NoiseKind::cell_multiplier;
  CHECK_THROWS_AS(stochastic_mollify_sample(u, k, wrong, 0), std::invalid_argument);

  const Field s = stochastic_mollify_sample(u, k, white(0.1), 7);
  for (std::size_t i = 0; i < u.size(); i += 101) {
    CHECK(std::abs(stochastic_mollify_sample_at(u, i, k, white(0.1), 7) - s.values[i]) < 1e-12);
  }

  const std::size_t idx = 163;
  std::vector<double> draws(10000);
  for (std::size_t r = 0; r < draws.size(); ++r) {
    draws[r] = stochastic_mollify_sample_at(u, idx, k, white(0.1, 9), r);
  }
  const SampleMoments mo = sample_moments(draws);
  CHECK(std::abs(mo.mean - mollify_at(u, idx, k)) <= 3 * mo.mean_se);
  const double var = stochastic_variance_at(u, idx, k, 0.1);
  CHECK(std::abs(mo.variance - var) <= 3 * mo.variance_se);
  // sigma^2 * sum u^2 phi_n^2 h approximates sigma^2 * integral u^2 phi_n^2.
  const double x = u.coord(idx);
  const double integral = trapezoid([&](double w) {
    const double v = std::pow(1 + 0.5 * std::sin(x - w / 8), 2);
    const double y[1] = {w / 8};
    return v * std::pow(k.eval(y), 2);
  }) / 8;
  CHECK(var == doctest::Approx(0.01 * integral).epsilon(1e-3));
}

TEST_CASE("variance grows like n in one dimension") {
  const Field u = sample_periodic_1d({kTwoPi, 1024, 1}, [](double x) { return 1 + 0.5 * std::sin(x); });
  std::vector<double> ns, vs;
  for (const int n : {4, 8, 16, 32}) {
    ns.push_back(n);
    vs.push_back(stochastic_variance_at(u, 100, scaled(1, n), 0.1));
  }
  CHECK(std::abs(fit_slope(ns, vs).slope - 1) < 0.3);
}

TEST_CASE("mse decomposition") {
  const Field u = sample_periodic_1d({kTwoPi, 1024, 1}, [](double x) { return std::sin(x); });
  const ScaledKernel k = scaled(1, 8);
  const MseDecomposition quiet = mse_decomposition(u, 100, k, white(0.0), 200, 1);
  CHECK(quiet.variance < 1e-28);
  CHECK(quiet.mse == doctest::Approx(quiet.bias_sq).epsilon(1e-10));

  const MseDecomposition d = mse_decomposition(u, 100, k, white(0.1), 4000, 2);
  CHECK(std::abs(d.mse - d.bias_sq - d.variance) <= 3 * d.mse_se);
  const MseDecomposition same = mse_decomposition(u, 100, k, white(0.1), 4000, 5);
  CHECK(same.mse == d.mse);
  CHECK(same.variance == d.variance);
  CHECK(same.mean == d.mean);

  const Field c = sample_periodic_1d({kTwoPi, 1024, 1}, [](double) { return 2.0; });
  const MseDecomposition dc = mse_decomposition(c, 10, k, white(0.1), 4000, 0);
  CHECK(dc.bias_sq < 1e-24);
  CHECK(std::abs(dc.mse - dc.variance) <= 3 * dc.mse_se);
  CHECK_THROWS_AS(mse_decomposition(u, 0, k, white(0.1), 99), std::invalid_argument);
}

TEST_CASE("nearest grid index") {
  const Field u = sine_field(64);
  const double x[1] = {kTwoPi * 10.2 / 64};
  CHECK(nearest_index(u, x) == 10);
  const double wrap[1] = {kTwoPi - 1e-9};
  CHECK(nearest_index(u, wrap) == 0);
}
