#include "fraclab/kantorovich.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fraclab/quadrature.hpp"
#include "fraclab/rng.hpp"

namespace fraclab {
namespace {

constexpr int kCellOrder = 8;

void check_point(std::span<const double> x, const GridSpec& grid) {
  if (static_cast<int>(x.size()) != grid.dim) {
    throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                " does not match grid dimension " + std::to_string(grid.dim));
  }
}

// Mean of (d + U)^p for U uniform on [0, 1]: sum_j C(p, j) d^{p-j} / (j + 1).
double shifted_monomial_mean(double d, int p) {
  double total = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= p; ++j) {
    total += binom * std::pow(d, p - j) / (j + 1.0);
    binom = binom * (p - j) / (j + 1.0);
  }
  return total;
}

}  // namespace

void GridSpec::validate() const {
  if (n < 1) {
    throw std::invalid_argument("GridSpec: n must be >= 1");
  }
  if (dim < 1) {
    throw std::invalid_argument("GridSpec: dim must be >= 1");
  }
  if (static_cast<int>(eval_box.lo.size()) != dim || static_cast<int>(eval_box.hi.size()) != dim) {
    throw std::invalid_argument("GridSpec: eval_box dimension mismatch");
  }
  for (int i = 0; i < dim; ++i) {
    if (!(eval_box.hi[static_cast<std::size_t>(i)] > eval_box.lo[static_cast<std::size_t>(i)])) {
      throw std::invalid_argument("GridSpec: eval_box must be nonempty");
    }
  }
}

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("NoiseModel: sigma must be >= 0");
  }
}

double cell_average(const ScalarFn& f, std::span<const std::int64_t> k, const GridSpec& grid) {
  const int dim = grid.dim;
  if (static_cast<int>(k.size()) != dim) {
    throw std::invalid_argument("cell_average: lattice point dimension mismatch");
  }
  const GaussRule& rule = gauss_legendre(kCellOrder);
  const double n = grid.n;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> t(static_cast<std::size_t>(dim));
  CompensatedSum sum;
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      t[a] = (static_cast<double>(k[a]) + 0.5 + 0.5 * rule.nodes[idx[a]]) / n;
      w *= 0.5 * rule.weights[idx[a]];
    }
    sum.add(w * f(t));
    std::size_t axis = idx.size();
    while (axis > 0) {
      --axis;
      if (++idx[axis] < rule.nodes.size()) {
        break;
      }
      idx[axis] = 0;
      if (axis == 0) {
        return sum.value();
      }
    }
  }
}

KantorovichStencil::KantorovichStencil(const ScalarFn& f, std::span<const double> x,
                                       const GridSpec& grid, const KernelParams& params,
                                       Diagnostics* diag) {
  grid.validate();
  params.validate();
  check_point(x, grid);
  const int dim = grid.dim;
  const int K = params.trunc_radius;
  const std::size_t width = static_cast<std::size_t>(2 * K + 1);
  const auto udim = static_cast<std::size_t>(dim);

  std::vector<std::int64_t> center(udim);
  std::vector<std::vector<double>> axis_phi(udim, std::vector<double>(width));
  double outside = 0.0;
  for (std::size_t a = 0; a < udim; ++a) {
    const double nx = grid.n * x[a];
    center[a] = static_cast<std::int64_t>(std::llround(nx));
    for (std::size_t j = 0; j < width; ++j) {
      const double k = static_cast<double>(center[a] - K + static_cast<std::int64_t>(j));
      axis_phi[a][j] = eval_Phi(params, nx - k);
    }
    // Union bound: each axis sum is at most one.
    outside += lattice_tail_bound(params, nx - static_cast<double>(center[a]), K);
  }
  tail_bound_ = outside;
  if (outside > params.tail_tol) {
    report(diag, "lattice_tail",
           "KantorovichStencil: truncated kernel mass bound " + std::to_string(outside) +
               " exceeds tolerance",
           outside);
  }

  const double prune = params.tail_tol / std::pow(static_cast<double>(width), dim);
  std::vector<std::size_t> idx(udim, 0);
  std::vector<double> partial(udim + 1, 1.0);
  std::vector<std::int64_t> k(udim);
  // Depth-first walk over [-K, K]^N in lexicographic order; a pruned prefix
  // skips its whole subtree because every Phi factor is below one.
  std::size_t depth = 0;
  for (;;) {
    if (idx[depth] == width) {
      if (depth == 0) {
        break;
      }
      idx[depth] = 0;
      --depth;
      ++idx[depth];
      continue;
    }
    const double w = partial[depth] * axis_phi[depth][idx[depth]];
    if (w < prune) {
      ++idx[depth];
      continue;
    }
    partial[depth + 1] = w;
    if (depth + 1 < udim) {
      ++depth;
      continue;
    }
    for (std::size_t a = 0; a < udim; ++a) {
      k[a] = center[a] - K + static_cast<std::int64_t>(idx[a]);
    }
    averages_.push_back(cell_average(f, k, grid));
    weights_.push_back(w);
    noise_index_.push_back(lattice_index(StreamTag::cell_multiplier, k));
    ++idx[depth];
  }
}

double KantorovichStencil::expectation() const {
  CompensatedSum sum;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    sum.add(averages_[i] * weights_[i]);
  }
  return sum.value();
}

double KantorovichStencil::sample(const NoiseModel& noise, std::uint64_t replicate) const {
  noise.validate();
  if (noise.kind != NoiseKind::cell_multiplier) {
    throw std::invalid_argument("KantorovichStencil::sample: noise kind must be cell_multiplier");
  }
  if (noise.sigma == 0.0) {
    return expectation();
  }
  CompensatedSum sum;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double multiplier =
        1.0 + noise.sigma * counter_normal(noise.base_seed, replicate, noise_index_[i]);
    sum.add(averages_[i] * multiplier * weights_[i]);
  }
  return sum.value();
}

double KantorovichStencil::variance(double sigma) const {
  CompensatedSum sum;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double term = averages_[i] * weights_[i];
    sum.add(term * term);
  }
  return sigma * sigma * sum.value();
}

double KantorovichStencil::weight_sum() const {
  CompensatedSum sum;
  for (const double w : weights_) {
    sum.add(w);
  }
  return sum.value();
}

double apply_expectation(const ScalarFn& f, std::span<const double> x, const GridSpec& grid,
                         const KernelParams& params, Diagnostics* diag) {
  return KantorovichStencil(f, x, grid, params, diag).expectation();
}

double sample(const ScalarFn& f, std::span<const double> x, const GridSpec& grid,
              const KernelParams& params, const NoiseModel& noise, std::uint64_t replicate) {
  return KantorovichStencil(f, x, grid, params).sample(noise, replicate);
}

double variance_closed_form(const ScalarFn& f, std::span<const double> x, const GridSpec& grid,
                            const KernelParams& params, double sigma) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("variance_closed_form: sigma must be >= 0");
  }
  return KantorovichStencil(f, x, grid, params).variance(sigma);
}

int MultiIndex::order() const {
  int total = 0;
  for (const int b : beta) {
    total += b;
  }
  return total;
}

double MultiIndex::factorial() const {
  double out = 1.0;
  for (const int b : beta) {
    for (int i = 2; i <= b; ++i) {
      out *= i;
    }
  }
  return out;
}

double kernel_moment(const MultiIndex& beta, std::span<const double> x, const GridSpec& grid,
                     const KernelParams& params) {
  grid.validate();
  params.validate();
  check_point(x, grid);
  if (static_cast<int>(beta.beta.size()) != grid.dim) {
    throw std::invalid_argument("kernel_moment: multi-index dimension mismatch");
  }
  for (const int b : beta.beta) {
    if (b < 0) {
      throw std::invalid_argument("kernel_moment: multi-index components must be >= 0");
    }
  }
  if (beta.order() > kMaxMomentOrder) {
    throw std::invalid_argument("kernel_moment: |beta| exceeds the supported maximum");
  }
  const int K = params.trunc_radius;
  double product = 1.0;
  for (std::size_t a = 0; a < beta.beta.size(); ++a) {
    const int p = beta.beta[a];
    const double nx = grid.n * x[a];
    const auto center = static_cast<std::int64_t>(std::llround(nx));
    CompensatedSum sum;
    for (std::int64_t k = center - K; k <= center + K; ++k) {
      const double d = static_cast<double>(k) - nx;
      sum.add(shifted_monomial_mean(d, p) * eval_Phi(params, nx - static_cast<double>(k)));
    }
    product *= sum.value() / std::pow(static_cast<double>(grid.n), p);
  }
  return product;
}

std::vector<MultiIndex> multi_indices(int dim, int m) {
  std::vector<MultiIndex> out;
  if (dim < 1 || m < 1) {
    return out;
  }
  for (int order = 1; order <= m; ++order) {
    // Enumerate compositions of `order` into `dim` nonnegative parts.
    std::vector<int> beta(static_cast<std::size_t>(dim), 0);
    beta[0] = order;
    for (;;) {
      out.push_back(MultiIndex{beta});
      // Next composition in reverse-lexicographic order.
      int i = dim - 2;
      while (i >= 0 && beta[static_cast<std::size_t>(i)] == 0) {
        --i;
      }
      if (i < 0) {
        break;
      }
      --beta[static_cast<std::size_t>(i)];
      int tail = 0;
      for (int j = i + 1; j < dim; ++j) {
        tail += beta[static_cast<std::size_t>(j)];
        beta[static_cast<std::size_t>(j)] = 0;
      }
      beta[static_cast<std::size_t>(i + 1)] = tail + 1;
    }
  }
  return out;
}

double voronovskaya_remainder(const SmoothFn& f, std::span<const double> x, const GridSpec& grid,
                              const KernelParams& params, int m) {
  if (m < 1 || m > kMaxMomentOrder) {
    throw std::invalid_argument("voronovskaya_remainder: m must be in [1, 16]");
  }
  const double expectation = apply_expectation(f.value, x, grid, params);
  CompensatedSum sum;
  sum.add(expectation);
  sum.add(-f.value(x));
  for (const MultiIndex& beta : multi_indices(grid.dim, m)) {
    const double moment = kernel_moment(beta, x, grid, params);
    sum.add(-f.derivative(x, beta.beta) * moment / beta.factorial());
  }
  return sum.value();
}

}  // namespace fraclab
