#include "fraclab/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fraclab {
namespace {

GaussRule build_rule(int order) {
  GaussRule rule;
  rule.nodes.assign(static_cast<std::size_t>(order), 0.0);
  rule.weights.assign(static_cast<std::size_t>(order), 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = order * (z * p1 - p2) / (z * z - 1.0);
      const double z_prev = z;
      z = z_prev - p1 / dp;
      if (std::abs(z - z_prev) < 1e-16) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = -z;
    rule.nodes[hi] = z;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (order % 2 == 1) {
    rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 256) {
    throw std::invalid_argument("gauss_legendre: order must be in [1, 256]");
  }
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, build_rule(order)).first;
  }
  // std::map nodes are stable, so the reference outlives the lock.
  return it->second;
}

double integrate_panels(const std::function<double(double)>& g, std::span<const double> breaks,
                        int order) {
  const GaussRule& rule = gauss_legendre(order);
  CompensatedSum total;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double b = breaks[p + 1];
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    CompensatedSum panel;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel.add(rule.weights[i] * g(mid + half * rule.nodes[i]));
    }
    total.add(half * panel.value());
  }
  return total.value();
}

double integrate_graded(const std::function<double(double)>& g, double a, double b, int order) {
  // 48 geometric levels towards a, then 64 uniform panels over the bulk.
  constexpr int kLevels = 48;
  constexpr int kBulk = 64;
  const double width = b - a;
  std::vector<double> breaks;
  breaks.reserve(kLevels + kBulk + 2);
  breaks.push_back(a);
  for (int level = kLevels; level >= 1; --level) {
    breaks.push_back(a + width * std::ldexp(1.0 / kBulk, -level));
  }
  for (int i = 1; i <= kBulk; ++i) {
    breaks.push_back(a + width * static_cast<double>(i) / kBulk);
  }
  breaks.back() = b;
  return integrate_panels(g, breaks, order);
}

}  // namespace fraclab
