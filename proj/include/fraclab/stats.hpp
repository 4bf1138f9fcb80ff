#pragma once

#include <cstddef>
#include <span>

namespace fraclab {

/// Least-squares line through (log x, log y).
struct SlopeEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // 95% confidence half-width of the slope
  std::size_t points = 0;
};

/// Throws std::invalid_argument for fewer than 4 points, mismatched lengths,
/// or any nonpositive coordinate.
SlopeEstimate fit_slope(std::span<const double> x, std::span<const double> y);

struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double mean_se = 0.0;
  double variance_se = 0.0;  // large-sample SE from the fourth central moment
};

/// Moments of a sample accumulated in index order. Needs at least 2 values.
SampleMoments sample_moments(std::span<const double> values);

}  // namespace fraclab
