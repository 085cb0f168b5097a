#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace stochgrad {

struct EstimatorStats {
  double mean = 0.0;
  double std = 0.0;  // unbiased (n - 1)
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  std::size_t n = 0;

  /// Standard error of the mean.
  double sem() const;
};

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requires at least two samples.
EstimatorStats estimator_stats(std::span<const double> samples);

double mean_of(std::span<const double> samples);

/// Linear-interpolation quantile (h = (n - 1) q) of an ascending range.
double sorted_quantile(std::span<const double> sorted, double q);

}  // namespace stochgrad
