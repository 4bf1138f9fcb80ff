#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fraclab/diagnostics.hpp"
#include "fraclab/kernel.hpp"

namespace fraclab {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Axis-aligned evaluation box in R^N.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Lattice resolution n and dimension N of the operator.
struct GridSpec {
  int n = 1;
  int dim = 1;
  Box eval_box{{0.0}, {1.0}};

  void validate() const;
};

enum class NoiseKind { cell_multiplier, white_noise_measure };

struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t base_seed = 42;
  NoiseKind kind = NoiseKind::cell_multiplier;

  void validate() const;
};

/// n^N times the integral of f over the cell prod_i [k_i/n, (k_i+1)/n], by an
/// 8-point Gauss-Legendre product rule.
double cell_average(const ScalarFn& f, std::span<const std::int64_t> k, const GridSpec& grid);

/// Truncated lattice terms of the operator at a fixed point x.
///
/// Holds, in fixed lexicographic lattice order, every k in the box
/// round(n x) + [-K, K]^N whose kernel weight Z(nx - k) is not pruned, with its
/// cell average and noise-stream index. Pruning drops a subtree as soon as the
/// partial product of Phi factors falls below tail_tol / (2K+1)^N, so the
/// dropped mass is at most tail_tol. Building the stencil evaluates f; the
/// expectation, noisy samples and closed-form variance are then cheap.
class KantorovichStencil {
 public:
  KantorovichStencil(const ScalarFn& f, std::span<const double> x, const GridSpec& grid,
                     const KernelParams& params, Diagnostics* diag = nullptr);

  /// sum_k avg_k Z(nx - k).
  double expectation() const;
  /// sum_k avg_k (1 + sigma W_k) Z(nx - k), W_k keyed by (seed, replicate, k).
  double sample(const NoiseModel& noise, std::uint64_t replicate) const;
  /// sigma^2 sum_k avg_k^2 Z(nx - k)^2.
  double variance(double sigma) const;
  /// sum_k Z(nx - k) over the retained terms.
  double weight_sum() const;

  std::size_t size() const { return weights_.size(); }
  /// Analytic bound on the kernel mass outside the truncation box.
  double tail_bound() const { return tail_bound_; }

 private:
  std::vector<double> averages_;
  std::vector<double> weights_;
  std::vector<std::uint64_t> noise_index_;
  double tail_bound_ = 0.0;
};

/// E[K_n^W(f, x)]: the deterministic Kantorovich operator.
double apply_expectation(const ScalarFn& f, std::span<const double> x, const GridSpec& grid,
                         const KernelParams& params, Diagnostics* diag = nullptr);

/// One realization of K_n^W(f, x). Requires noise.kind == cell_multiplier.
double sample(const ScalarFn& f, std::span<const double> x, const GridSpec& grid,
              const KernelParams& params, const NoiseModel& noise, std::uint64_t replicate);

/// Var[K_n^W(f, x)] = sigma^2 sum_k avg_k^2 Z^2(nx - k).
double variance_closed_form(const ScalarFn& f, std::span<const double> x, const GridSpec& grid,
                            const KernelParams& params, double sigma);

/// Multi-index beta; order() = sum of components.
struct MultiIndex {
  std::vector<int> beta;

  int order() const;
  /// prod_i beta_i!
  double factorial() const;
};

constexpr int kMaxMomentOrder = 16;

/// M_{beta,n}(x) = sum_k (n^N int_cell (t - x)^beta dt) Z(nx - k), with the
/// per-cell monomial integrals in closed form. The product kernel makes the
/// lattice sum factor into one-dimensional sums per axis.
double kernel_moment(const MultiIndex& beta, std::span<const double> x, const GridSpec& grid,
                     const KernelParams& params);

/// Analytic test function: value and exact partial derivatives d^beta f.
struct SmoothFn {
  ScalarFn value;
  std::function<double(std::span<const double>, std::span<const int>)> derivative;
};

/// All multi-indices of dimension `dim` with 1 <= |beta| <= m, graded order.
std::vector<MultiIndex> multi_indices(int dim, int m);

/// E[K_n f](x) - f(x) - sum_{1<=|beta|<=m} d^beta f(x) M_{beta,n}(x) / beta!.
double voronovskaya_remainder(const SmoothFn& f, std::span<const double> x, const GridSpec& grid,
                              const KernelParams& params, int m = 2);

}  // namespace fraclab
