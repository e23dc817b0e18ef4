#include "smoothflood/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smoothflood/graph.hpp"

namespace smoothflood {

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw UsageError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double mean(std::span<const double> values) {
  if (values.empty()) throw UsageError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("fit_power_law: x and y differ in length");
  if (x.size() < 3) throw UsageError("fit_power_law: need at least 3 points");
  const std::size_t m = x.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw UsageError("fit_power_law: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = mean(lx);
  const double my = mean(ly);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw UsageError("fit_power_law: x values are all equal");
  PowerFit fit;
  fit.points = m;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    fit.residuals.push_back(r);
    sse += r * r;
  }
  fit.slope_stderr = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
  return fit;
}

RatioInterval bootstrap_median_ratio(std::span<const double> numerator,
                                     std::span<const double> denominator, std::size_t resamples,
                                     double level, RoundRng& rng) {
  if (numerator.empty() || denominator.empty()) throw UsageError("bootstrap on an empty sample");
  RatioInterval out;
  out.ratio = median(numerator) / median(denominator);
  std::vector<double> ratios;
  ratios.reserve(resamples);
  std::vector<double> a(numerator.size()), b(denominator.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    for (double& v : a) v = numerator[rng.uniform_below(numerator.size())];
    for (double& v : b) v = denominator[rng.uniform_below(denominator.size())];
    ratios.push_back(median(a) / median(b));
  }
  const double tail = (1.0 - level) / 2.0;
  out.lower = resamples ? quantile(ratios, tail) : out.ratio;
  out.upper = resamples ? quantile(ratios, 1.0 - tail) : out.ratio;
  return out;
}

}  // namespace smoothflood
