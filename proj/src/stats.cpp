#include "fraclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "fraclab/quadrature.hpp"

namespace fraclab {

SlopeEstimate fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("fit_slope: x and y lengths differ");
  }
  if (x.size() < 4) {
    throw std::invalid_argument("fit_slope: need at least 4 points");
  }
  const std::size_t m = x.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_slope: coordinates must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("fit_slope: x values must not all coincide");
  }
  SlopeEstimate out;
  out.points = m;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - out.intercept - out.slope * lx[i];
    rss += r * r;
  }
  const double dof = static_cast<double>(m - 2);
  const double se = std::sqrt(rss / dof / sxx);
  const boost::math::students_t dist(dof);
  out.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  return out;
}

SampleMoments sample_moments(std::span<const double> values) {
  if (values.size() < 2) {
    throw std::invalid_argument("sample_moments: need at least 2 values");
  }
  SampleMoments out;
  out.count = values.size();
  const double count = static_cast<double>(out.count);
  CompensatedSum sum;
  for (const double v : values) {
    sum.add(v);
  }
  out.mean = sum.value() / count;
  CompensatedSum m2, m4;
  for (const double v : values) {
    const double d = v - out.mean;
    m2.add(d * d);
    m4.add(d * d * d * d);
  }
  out.variance = m2.value() / (count - 1.0);
  out.mean_se = std::sqrt(out.variance / count);
  const double biased = m2.value() / count;
  const double central4 = m4.value() / count;
  out.variance_se =
      std::sqrt(std::max(0.0, (central4 - biased * biased * (count - 3.0) / (count - 1.0)) / count));
  return out;
}

}  // namespace fraclab
