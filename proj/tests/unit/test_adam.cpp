#include <doctest.h>

#include <cmath>
#include <limits>

#include "stochgrad/adam.hpp"

using namespace stochgrad;

TEST_CASE("adam: first step moves by about lr against the gradient") {
  AdamState s;
  s.lr = 0.01;
  const auto r = adam_step(s, 3.7, 2.0);
  CHECK(r.theta == doctest::Approx(2.0 - 0.01).epsilon(1e-6));
  CHECK(r.state.t == 1);
  const auto n = adam_step(s, -0.2, 2.0);
  CHECK(n.theta > 2.0);
}

TEST_CASE("adam: zero gradient from rest leaves theta unchanged") {
  const auto r = adam_step(AdamState{}, 0.0, 1.5);
  CHECK(r.theta == 1.5);
}

TEST_CASE("adam: moments follow the recursions") {
  AdamState s;
  double theta = 0.0;
  double m = 0.0, v = 0.0;
  const double grads[] = {1.0, -2.0, 0.5, 4.0, -0.1};
  for (int i = 0; i < 5; ++i) {
    const double g = grads[i];
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1.0 - std::pow(0.9, i + 1));
    const double vh = v / (1.0 - std::pow(0.999, i + 1));
    const double expect = theta - 0.01 * mh / (std::sqrt(vh) + 1e-8);
    const auto r = adam_step(s, g, theta);
    CHECK(r.state.t == static_cast<std::uint64_t>(i + 1));
    CHECK(r.state.v >= 0.0);
    CHECK(r.state.m == doctest::Approx(m));
    CHECK(r.theta == doctest::Approx(expect).epsilon(1e-12));
    s = r.state;
    theta = r.theta;
  }
}

TEST_CASE("adam: non-finite gradients are rejected") {
  CHECK_THROWS_AS(adam_step(AdamState{}, std::nan(""), 1.0), OptimizerDiverged);
  CHECK_THROWS_AS(adam_step(AdamState{}, std::numeric_limits<double>::infinity(), 1.0), OptimizerDiverged);
}
