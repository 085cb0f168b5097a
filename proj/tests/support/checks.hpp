#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

// Statistical helpers computed independently of the library under test.
namespace testing {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

inline bool within_se(const MeanSe& m, double target, double k) { return std::abs(m.mean - target) <= k * m.se; }
inline bool within_3se(const MeanSe& m, double target) { return within_se(m, target, 3.0); }

// One-sample Kolmogorov-Smirnov test against U(0,1); asymptotic p-value
// from the Kolmogorov series with Stephens' small-sample correction.
inline double ks_uniform_pvalue(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - xs[i], xs[i] - lo});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

inline double chi2_sf(double stat, double dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Sum of Bernoulli outcomes with known, possibly different, probabilities.
struct BernoulliTally {
  double ones = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  std::size_t count = 0;

  void add(double p, int outcome) {
    ones += outcome;
    expected += p;
    variance += p * (1.0 - p);
    ++count;
  }
  double z2() const { return variance > 0.0 ? (ones - expected) * (ones - expected) / variance : 0.0; }
};

// Chi-square over bins of independent Bernoulli tallies; one dof per nonempty bin.
inline double tally_pvalue(std::span<const BernoulliTally> bins) {
  double stat = 0.0;
  double dof = 0.0;
  for (const auto& b : bins) {
    if (b.variance <= 0.0) continue;
    stat += b.z2();
    dof += 1.0;
  }
  return dof > 0.0 ? chi2_sf(stat, dof) : 1.0;
}

inline std::uint64_t bits_of(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

}  // namespace testing
