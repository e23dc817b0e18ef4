#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "smoothflood/rng.hpp"

namespace smoothflood {

/// Linearly interpolated sample quantile (R type 7). `values` need not be sorted.
double quantile(std::span<const double> values, double q);
double median(std::span<const double> values);
double mean(std::span<const double> values);

/// Least-squares fit of log(y) = intercept + slope * log(x).
struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  /// log(y) - fitted, per point.
  std::vector<double> residuals;
  std::size_t points = 0;
};

/// Requires at least 3 points with positive x and y.
PowerFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct RatioInterval {
  double ratio = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// median(numerator) / median(denominator) with a percentile bootstrap interval.
RatioInterval bootstrap_median_ratio(std::span<const double> numerator,
                                     std::span<const double> denominator, std::size_t resamples,
                                     double level, RoundRng& rng);

}  // namespace smoothflood
