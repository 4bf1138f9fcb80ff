#include "fraclab/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fraclab/quadrature.hpp"

namespace fraclab {
namespace {

// M with the deformation entering only through c = ln(q)/2.
double m_from_shift(double lambda, double c, double x) {
  const double a = std::abs(lambda * (x + 1.0) - c);
  const double b = std::abs(lambda * (x - 1.0) - c);
  const double numer = -std::expm1(-4.0 * lambda);
  const double denom = 2.0 * (1.0 + std::exp(-2.0 * a)) * (1.0 + std::exp(-2.0 * b));
  return std::exp(2.0 * lambda - (a + b)) * numer / denom;
}

}  // namespace

void KernelParams::validate() const {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw std::invalid_argument("KernelParams: q must be positive");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("KernelParams: lambda must be positive");
  }
  if (trunc_radius < 1) {
    throw std::invalid_argument("KernelParams: trunc_radius must be >= 1");
  }
  if (!(tail_tol > 0.0)) {
    throw std::invalid_argument("KernelParams: tail_tol must be positive");
  }
}

double eval_g(const KernelParams& p, double x) {
  if (x >= 0.0) {
    const double e = p.q * std::exp(-2.0 * p.lambda * x);
    return (1.0 - e) / (1.0 + e);
  }
  const double e = std::exp(2.0 * p.lambda * x);
  return (e - p.q) / (e + p.q);
}

double eval_g_prime(const KernelParams& p, double x) {
  if (x >= 0.0) {
    const double e = std::exp(-2.0 * p.lambda * x);
    const double d = 1.0 + p.q * e;
    return 4.0 * p.lambda * p.q * e / (d * d);
  }
  const double e = std::exp(2.0 * p.lambda * x);
  const double d = e + p.q;
  return 4.0 * p.lambda * p.q * e / (d * d);
}

double eval_M(const KernelParams& p, double x) {
  return m_from_shift(p.lambda, 0.5 * std::log(p.q), x);
}

double eval_Phi(const KernelParams& p, double x) {
  const double c = 0.5 * std::log(p.q);
  return 0.5 * (m_from_shift(p.lambda, c, x) + m_from_shift(p.lambda, -c, x));
}

double eval_Z(const KernelParams& p, std::span<const double> x) {
  if (x.empty()) {
    throw std::invalid_argument("eval_Z: point must have at least one coordinate");
  }
  double product = 1.0;
  for (const double xi : x) {
    product *= eval_Phi(p, xi);
  }
  return product;
}

double phi_decay_constant(const KernelParams& p) {
  return std::sinh(2.0 * p.lambda) * std::max(p.q, 1.0 / p.q);
}

double lattice_tail_bound(const KernelParams& p, double y, int K) {
  const double gap_right = K + 1.0 - y;
  const double gap_left = K + 1.0 + y;
  if (gap_right <= 0.0 || gap_left <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double c0 = phi_decay_constant(p);
  const double geometric = 1.0 / (-std::expm1(-2.0 * p.lambda));
  return c0 * geometric *
         (std::exp(-2.0 * p.lambda * gap_right) + std::exp(-2.0 * p.lambda * gap_left));
}

double partition_sum(const KernelParams& p, double x, Diagnostics* diag) {
  p.validate();
  const int K = p.trunc_radius;
  CompensatedSum sum;
  for (int k = -K; k <= K; ++k) {
    sum.add(eval_Phi(p, x - k));
  }
  const double bound = lattice_tail_bound(p, x, K);
  if (bound > p.tail_tol) {
    report(diag, "lattice_tail",
           "partition_sum: tail bound " + std::to_string(bound) + " exceeds tolerance at K=" +
               std::to_string(K),
           bound);
  }
  return sum.value();
}

}  // namespace fraclab
