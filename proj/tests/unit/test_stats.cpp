#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stochgrad/stats.hpp"

using namespace stochgrad;

TEST_CASE("stats: small examples") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  const auto s = estimator_stats(a);
  CHECK(s.mean == 2.0);
  CHECK(s.std == 1.0);
  CHECK(s.n == 3);
  CHECK(s.q50 == 2.0);
  CHECK(s.sem() == doctest::Approx(1.0 / std::sqrt(3.0)));

  const std::vector<double> c(10, 4.5);
  const auto k = estimator_stats(c);
  CHECK(k.std == 0.0);
  CHECK(k.q25 == 4.5);
  CHECK(k.q75 == 4.5);
}

TEST_CASE("stats: interpolated quartiles") {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);  // order must not matter
  const auto s = estimator_stats(v);
  CHECK(s.q25 == doctest::Approx(25.75));
  CHECK(s.q50 == doctest::Approx(50.5));
  CHECK(s.q75 == doctest::Approx(75.25));
  std::sort(v.begin(), v.end());
  CHECK(sorted_quantile(v, 0.0) == 1.0);
  CHECK(sorted_quantile(v, 1.0) == 100.0);
}

TEST_CASE("stats: quartiles are ordered") {
  std::vector<double> v;
  double x = 0.3;
  for (int i = 0; i < 57; ++i) {
    x = std::fmod(x * 7.31 + 0.17, 1.0);
    v.push_back(x * x - 0.2);
  }
  const auto s = estimator_stats(v);
  CHECK(s.q25 <= s.q50);
  CHECK(s.q50 <= s.q75);
  CHECK(s.std >= 0.0);
}

TEST_CASE("stats: fewer than two samples") {
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(estimator_stats(one), InsufficientSamples);
  CHECK_THROWS_AS(estimator_stats(std::span<const double>{}), InsufficientSamples);
}
