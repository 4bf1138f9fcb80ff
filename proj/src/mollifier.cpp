#include "fraclab/mollifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fraclab/fft.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/rng.hpp"
#include "fraclab/stats.hpp"

namespace fraclab {
namespace {

double bump_profile(double r) {
  if (r >= 1.0) {
    return 0.0;
  }
  return std::exp(-1.0 / (1.0 - r * r));
}

// Integral over R^N of a radial function g(|x|) supported in the ball of the
// given radius.
double radial_integral(int dim, double radius, const std::function<double(double)>& g, int order) {
  if (dim == 1) {
    return 2.0 * integrate_graded(g, 0.0, radius, order);
  }
  return 2.0 * std::numbers::pi *
         integrate_graded([&](double r) { return r * g(r); }, 0.0, radius, order);
}

double scaled_l2(const Mollifier& m, int n, double gamma) {
  const double amp = std::pow(static_cast<double>(n), m.dim - gamma);
  const double nd = n;
  return radial_integral(
      m.dim, 1.0 / nd,
      [&](double r) {
        const double v = amp * m.normalization * bump_profile(nd * r);
        return v * v;
      },
      20);
}

void check_resolution(const Field& u, const ScaledKernel& kernel) {
  u.validate();
  kernel.validate();
  if (kernel.base.dim != u.dim) {
    throw std::invalid_argument("mollify: kernel dimension does not match field dimension");
  }
  const double h = u.spacing();
  if (h * 4.0 * kernel.n > 1.0 + 1e-12) {
    throw std::invalid_argument("mollify: grid spacing " + std::to_string(h) +
                                " is coarser than 1/(4n) for n = " + std::to_string(kernel.n));
  }
  if (u.periodic && 2.0 / kernel.n > u.length) {
    throw std::invalid_argument("mollify: kernel support exceeds the period");
  }
  if (!u.periodic && u.dim != 1) {
    throw std::invalid_argument("mollify: boxed fields are supported in 1D only");
  }
}

inline std::size_t wrap(long i, std::size_t p) {
  const auto ps = static_cast<long>(p);
  return static_cast<std::size_t>(((i % ps) + ps) % ps);
}

// Quadrature weights h^N phi_n(m h) on the offsets |m_i h| < 1/n, rescaled so
// that they sum to the exact kernel mass n^{-gamma}. Without the rescaling a
// grid at the coarsest admissible spacing loses about 1e-3 of the mass, which
// swamps the O(n^-2) bias.
class DiscreteKernel {
 public:
  DiscreteKernel(const Field& u, const ScaledKernel& kernel)
      : dim_(u.dim),
        radius_(static_cast<long>(std::floor(1.0 / (kernel.n * u.spacing())))),
        side_(static_cast<std::size_t>(2 * radius_ + 1)) {
    const double h = u.spacing();
    const double cell = u.cell_volume();
    w_.assign(dim_ == 1 ? side_ : side_ * side_, 0.0);
    CompensatedSum mass;
    for (long mx = -radius_; mx <= radius_; ++mx) {
      for (long my = dim_ == 1 ? 0 : -radius_; my <= (dim_ == 1 ? 0 : radius_); ++my) {
        double v = 0.0;
        if (dim_ == 1) {
          const double x = static_cast<double>(mx) * h;
          v = cell * kernel.eval(std::span<const double>(&x, 1));
        } else {
          const std::array<double, 2> x{static_cast<double>(mx) * h, static_cast<double>(my) * h};
          v = cell * kernel.eval(x);
        }
        slot(mx, my) = v;
        mass.add(v);
      }
    }
    const double scale = std::pow(static_cast<double>(kernel.n), -kernel.gamma) / mass.value();
    for (double& v : w_) {
      v *= scale;
    }
  }

  long radius() const { return radius_; }
  double at(long mx, long my = 0) const {
    if (std::abs(mx) > radius_ || std::abs(my) > radius_) {
      return 0.0;
    }
    return w_[index(mx, my)];
  }

 private:
  std::size_t index(long mx, long my) const {
    const auto ix = static_cast<std::size_t>(mx + radius_);
    return dim_ == 1 ? ix : ix * side_ + static_cast<std::size_t>(my + radius_);
  }
  double& slot(long mx, long my) { return w_[index(mx, my)]; }

  int dim_;
  long radius_;
  std::size_t side_;
  std::vector<double> w_;
};

std::vector<double> periodic_convolve(const Field& u, std::span<const double> values,
                                      const ScaledKernel& kernel) {
  const DiscreteKernel stencil(u, kernel);
  const std::size_t p = u.points;
  std::vector<double> w(u.size(), 0.0);
  if (u.dim == 1) {
    for (std::size_t i = 0; i < p; ++i) {
      w[i] = stencil.at(fft::mode_index(i, p));
    }
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        w[i * p + j] = stencil.at(fft::mode_index(i, p), fft::mode_index(j, p));
      }
    }
  }
  fft::Spectrum uh = fft::forward(values, u.dim, p);
  const fft::Spectrum wh = fft::forward(w, u.dim, p);
  for (std::size_t i = 0; i < uh.size(); ++i) {
    uh[i] *= wh[i];
  }
  return fft::inverse_real(std::move(uh), u.dim, p);
}

// Direct evaluation of sum_m cell_value(i - m) w(m) around grid index
// `index`; `cell_value` receives the signed 1D position or the wrapped flat
// 2D index.
template <typename CellValue>
double direct_sum(const Field& u, std::size_t index, const DiscreteKernel& stencil,
                  CellValue&& cell_value) {
  const long radius = stencil.radius();
  const auto p = static_cast<long>(u.points);
  CompensatedSum sum;
  if (u.dim == 1) {
    const auto i = static_cast<long>(index);
    for (long m = -radius; m <= radius; ++m) {
      const double w = stencil.at(m);
      if (w != 0.0) {
        sum.add(cell_value(i - m) * w);
      }
    }
    return sum.value();
  }
  const auto ix = static_cast<long>(index / u.points);
  const auto iy = static_cast<long>(index % u.points);
  for (long mx = -radius; mx <= radius; ++mx) {
    for (long my = -radius; my <= radius; ++my) {
      const double w = stencil.at(mx, my);
      if (w == 0.0) {
        continue;
      }
      const long jx = static_cast<long>(wrap(ix - mx, u.points));
      const long jy = static_cast<long>(wrap(iy - my, u.points));
      sum.add(cell_value(jx * p + jy) * w);
    }
  }
  return sum.value();
}

// Sample value for a signed 1D/flat index, wrapped or clamped to the field.
double sample_value(const Field& u, long j) {
  if (u.dim == 2) {
    return u.values[static_cast<std::size_t>(j)];
  }
  if (u.periodic) {
    return u.values[wrap(j, u.points)];
  }
  const long last = static_cast<long>(u.points) - 1;
  return u.values[static_cast<std::size_t>(std::clamp(j, 0L, last))];
}

// Canonical cell label used to key white noise: wrapped for periodic fields,
// the signed virtual cell for boxed extensions.
std::int64_t cell_label(const Field& u, long j) {
  if (u.dim == 1 && u.periodic) {
    return static_cast<std::int64_t>(wrap(j, u.points));
  }
  return static_cast<std::int64_t>(j);
}

double noise_factor(const Field& u, const NoiseModel& noise, std::uint64_t replicate,
                    std::int64_t label) {
  const double scale = noise.sigma / std::sqrt(u.cell_volume());
  const double xi =
      counter_normal(noise.base_seed, replicate, lattice_index(StreamTag::white_noise, label));
  return 1.0 + scale * xi;
}

void check_noise(const NoiseModel& noise) {
  noise.validate();
  if (noise.kind != NoiseKind::white_noise_measure) {
    throw std::invalid_argument("stochastic mollifier: noise kind must be white_noise_measure");
  }
}

}  // namespace

double Mollifier::eval_radius(double r) const { return normalization * bump_profile(r); }

double Mollifier::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument("Mollifier::eval: point dimension mismatch");
  }
  double r2 = 0.0;
  for (const double xi : x) {
    r2 += xi * xi;
  }
  return r2 >= 1.0 ? 0.0 : eval_radius(std::sqrt(r2));
}

double Mollifier::mass() const {
  return radial_integral(dim, 1.0, [this](double r) { return eval_radius(r); }, 24);
}

Mollifier make_bump(int dim) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("make_bump: dim must be 1 or 2");
  }
  Mollifier m;
  m.dim = dim;
  m.normalization = 1.0 / radial_integral(dim, 1.0, bump_profile, 20);
  if (std::abs(m.mass() - 1.0) > 1e-10) {
    throw std::runtime_error("make_bump: normalization check failed");
  }
  m.l2_norm_sq = scaled_l2(m, 1, 0.0);
  return m;
}

void ScaledKernel::validate() const {
  if (n < 1) {
    throw std::invalid_argument("ScaledKernel: n must be >= 1");
  }
  if (!(gamma >= 0.0)) {
    throw std::invalid_argument("ScaledKernel: gamma must be >= 0");
  }
  if (!(base.normalization > 0.0)) {
    throw std::invalid_argument("ScaledKernel: base mollifier is not initialized");
  }
}

double ScaledKernel::amplitude() const {
  return std::pow(static_cast<double>(n), base.dim - gamma);
}

double ScaledKernel::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != base.dim) {
    throw std::invalid_argument("ScaledKernel::eval: point dimension mismatch");
  }
  double r2 = 0.0;
  for (const double xi : x) {
    r2 += xi * xi;
  }
  const double r = n * std::sqrt(r2);
  return r >= 1.0 ? 0.0 : amplitude() * base.eval_radius(r);
}

Field mollify(const Field& u, const ScaledKernel& kernel) {
  check_resolution(u, kernel);
  if (u.periodic) {
    return with_values(u, periodic_convolve(u, u.values, kernel));
  }
  const DiscreteKernel stencil(u, kernel);
  const long radius = stencil.radius();
  Field out = u;
  out.boundary_layer.assign(u.points, 0);
  for (std::size_t i = 0; i < u.points; ++i) {
    out.values[i] = direct_sum(u, i, stencil, [&](long j) { return sample_value(u, j); });
    const auto is = static_cast<long>(i);
    if (is < radius || is > static_cast<long>(u.points) - 1 - radius) {
      out.boundary_layer[i] = 1;
    }
  }
  return out;
}

double mollify_at(const Field& u, std::size_t index, const ScaledKernel& kernel) {
  check_resolution(u, kernel);
  if (index >= u.size()) {
    throw std::out_of_range("mollify_at: index outside the field");
  }
  return direct_sum(u, index, DiscreteKernel(u, kernel),
                    [&](long j) { return sample_value(u, j); });
}

double l2_norm_sq_scaled(const ScaledKernel& kernel) {
  kernel.validate();
  return scaled_l2(kernel.base, kernel.n, kernel.gamma);
}

double c_phi(const Mollifier& moll, double exponent, int order) {
  if (!(exponent >= 0.0)) {
    throw std::invalid_argument("c_phi: exponent must be >= 0");
  }
  return radial_integral(
      moll.dim, 1.0, [&](double r) { return std::pow(r, exponent) * moll.eval_radius(r); }, order);
}

double c_phi(const Mollifier& moll, FracOrder alpha) { return c_phi(moll, alpha.value()); }

Field stochastic_mollify_sample(const Field& u, const ScaledKernel& kernel, const NoiseModel& noise,
                                std::uint64_t replicate) {
  check_resolution(u, kernel);
  check_noise(noise);
  if (u.periodic) {
    std::vector<double> weighted(u.values);
    for (std::size_t j = 0; j < weighted.size(); ++j) {
      weighted[j] *= noise_factor(u, noise, replicate, static_cast<std::int64_t>(j));
    }
    return with_values(u, periodic_convolve(u, weighted, kernel));
  }
  Field out = mollify(u, kernel);
  for (std::size_t i = 0; i < u.points; ++i) {
    out.values[i] = stochastic_mollify_sample_at(u, i, kernel, noise, replicate);
  }
  return out;
}

double stochastic_mollify_sample_at(const Field& u, std::size_t index, const ScaledKernel& kernel,
                                    const NoiseModel& noise, std::uint64_t replicate) {
  check_resolution(u, kernel);
  check_noise(noise);
  if (index >= u.size()) {
    throw std::out_of_range("stochastic_mollify_sample_at: index outside the field");
  }
  return direct_sum(u, index, DiscreteKernel(u, kernel), [&](long j) {
    return sample_value(u, j) * noise_factor(u, noise, replicate, cell_label(u, j));
  });
}

double stochastic_variance_at(const Field& u, std::size_t index, const ScaledKernel& kernel,
                              double sigma) {
  check_resolution(u, kernel);
  if (index >= u.size()) {
    throw std::out_of_range("stochastic_variance_at: index outside the field");
  }
  // With w = h^N phi_n the variance sigma^2 sum u^2 phi_n^2 h^N is
  // sigma^2 sum u^2 w^2 / h^N.
  const DiscreteKernel stencil(u, kernel);
  const long radius = stencil.radius();
  CompensatedSum sum;
  if (u.dim == 1) {
    const auto i = static_cast<long>(index);
    for (long m = -radius; m <= radius; ++m) {
      const double w = stencil.at(m);
      const double v = sample_value(u, i - m);
      sum.add(v * v * w * w);
    }
  } else {
    const auto ix = static_cast<long>(index / u.points);
    const auto iy = static_cast<long>(index % u.points);
    for (long mx = -radius; mx <= radius; ++mx) {
      for (long my = -radius; my <= radius; ++my) {
        const double w = stencil.at(mx, my);
        const double v = u.values[wrap(ix - mx, u.points) * u.points + wrap(iy - my, u.points)];
        sum.add(v * v * w * w);
      }
    }
  }
  return sigma * sigma * sum.value() / u.cell_volume();
}

MseDecomposition mse_decomposition(const Field& u, std::size_t index, const ScaledKernel& kernel,
                                   const NoiseModel& noise, std::size_t replicates,
                                   unsigned workers) {
  if (replicates < 100) {
    throw std::invalid_argument("mse_decomposition: need at least 100 replicates");
  }
  check_noise(noise);
  MseDecomposition out;
  out.replicates = replicates;
  out.target = u.values.at(index);
  out.expectation = mollify_at(u, index, kernel);
  out.bias_sq = (out.expectation - out.target) * (out.expectation - out.target);
  const std::vector<double> draws = parallel_map(replicates, workers, [&](std::size_t r) {
    return stochastic_mollify_sample_at(u, index, kernel, noise, r);
  });
  const SampleMoments draw = sample_moments(draws);
  out.mean = draw.mean;
  out.variance = draw.variance;
  out.variance_se = draw.variance_se;
  std::vector<double> sq_err(draws.size());
  for (std::size_t r = 0; r < draws.size(); ++r) {
    sq_err[r] = (draws[r] - out.target) * (draws[r] - out.target);
  }
  const SampleMoments err = sample_moments(sq_err);
  out.mse = err.mean;
  out.mse_se = err.mean_se;
  return out;
}

std::size_t nearest_index(const Field& u, std::span<const double> x) {
  u.validate();
  if (static_cast<int>(x.size()) != u.dim) {
    throw std::invalid_argument("nearest_index: point dimension mismatch");
  }
  const double h = u.spacing();
  std::size_t flat = 0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const long raw = std::lround((x[a] - u.origin) / h);
    std::size_t i = 0;
    if (u.periodic) {
      i = wrap(raw, u.points);
    } else {
      i = static_cast<std::size_t>(std::clamp(raw, 0L, static_cast<long>(u.points) - 1));
    }
    flat = flat * u.points + i;
  }
  return flat;
}

}  // namespace fraclab
