#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fraclab {

/// Neumaier-compensated running sum. Summation order is the caller's order,
/// so identical input sequences always produce identical results.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule of the given order (computed once per order, cached).
const GaussRule& gauss_legendre(int order);

/// Composite Gauss-Legendre integral of g over consecutive breakpoints.
double integrate_panels(const std::function<double(double)>& g, std::span<const double> breaks,
                        int order);

/// Integral over [a, b] on panels graded geometrically towards a; resolves
/// algebraic endpoint behaviour such as (x - a)^p with non-integer p.
double integrate_graded(const std::function<double(double)>& g, double a, double b, int order);

}  // namespace fraclab
