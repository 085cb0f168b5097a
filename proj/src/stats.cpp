#include "stochgrad/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stochgrad {

double EstimatorStats::sem() const { return n > 0 ? std / std::sqrt(static_cast<double>(n)) : 0.0; }

double mean_of(std::span<const double> samples) {
  if (samples.empty()) throw InsufficientSamples("mean of an empty sample");
  double acc = 0.0;
  for (double s : samples) acc += s;
  return acc / static_cast<double>(samples.size());
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InsufficientSamples("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EstimatorStats estimator_stats(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientSamples("std needs at least 2 samples");
  EstimatorStats s;
  s.n = samples.size();
  s.mean = mean_of(samples);
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  s.q25 = sorted_quantile(sorted, 0.25);
  s.q50 = sorted_quantile(sorted, 0.50);
  s.q75 = sorted_quantile(sorted, 0.75);
  return s;
}

}  // namespace stochgrad
