#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "checks.hpp"
#include "stochgrad/experiments.hpp"

using namespace stochgrad;

namespace {

ExperimentSetup setup_for(SimMode mode, std::uint64_t seed = 1) {
  ExperimentSetup s;
  s.config.mode = mode;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("polyfit recovers a cubic") {
  std::vector<double> x, y;
  for (int i = 0; i <= 20; ++i) {
    const double t = 1.0 + 0.15 * i;
    x.push_back(t);
    y.push_back(0.5 - 2.0 * t + 0.3 * t * t * t);
  }
  const PolyFit fit = fit_polynomial(x, y, 6);
  for (double t : {1.1, 2.0, 3.7}) {
    CHECK(fit.value(t) == doctest::Approx(0.5 - 2.0 * t + 0.3 * t * t * t).epsilon(1e-9));
    CHECK(fit.derivative(t) == doctest::Approx(-2.0 + 0.9 * t * t).epsilon(1e-8));
  }
  const std::vector<double> one_x = {2.0}, one_y = {5.0};
  const PolyFit c = fit_polynomial(one_x, one_y, 6);
  CHECK(c.coeffs.size() == 1);
  CHECK(c.value(9.0) == 5.0);
  CHECK(c.derivative(9.0) == 0.0);
  CHECK_THROWS_AS(fit_polynomial(std::span<const double>{}, std::span<const double>{}, 2), std::invalid_argument);
}

TEST_CASE("scan: one point, every method") {
  const auto s = setup_for(SimMode::EnergyLoss);
  const std::vector<double> grid = {2.0};
  const auto r = scan(s, grid, 100, kAllMethods);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].theta == 2.0);
  CHECK(r.points[0].loss.n == 100);
  CHECK(r.points[0].grads.size() == 4);
  CHECK(r.points[0].poly_fit_grad == 0.0);
  CHECK_THROWS_AS(scan(s, std::span<const double>{}, 100, kAllMethods), std::invalid_argument);
}

TEST_CASE("scan: fitted slope changes sign at the minimum") {
  const auto s = setup_for(SimMode::Shower);
  std::vector<double> grid;
  for (int i = 0; i < 13; ++i) grid.push_back(0.8 + 0.15 * i);
  const std::vector<Method> none;
  const auto r = scan(s, grid, 300, none, 4);
  const auto best = std::min_element(r.points.begin(), r.points.end(),
                                     [](const auto& a, const auto& b) { return a.loss.mean < b.loss.mean; });
  REQUIRE(best != r.points.begin());
  REQUIRE(best + 1 != r.points.end());
  CHECK(r.fit.derivative(grid.front()) < 0.0);
  CHECK(r.fit.derivative(grid.back()) > 0.0);
}

TEST_CASE("gradient estimators agree with the slope of the loss curve") {
  // Slope from common-stream expected losses at theta +/- h; a fixed n keeps it cheap.
  for (SimMode mode : {SimMode::EnergyLoss, SimMode::Shower}) {
    const auto s = setup_for(mode, 3);
    const double theta = 2.5;
    const double h = 0.25;
    const double slope =
        (expected_loss(s, theta + h, 3000, 77) - expected_loss(s, theta - h, 3000, 77)) / (2.0 * h);
    for (Method m : {Method::ScoreBaseline, Method::StochAD}) {
      const auto v = sample_values(grad_samples(s, theta, 3000, m));
      const auto ms = testing::mean_se(v);
      // Secant bias over the 2h window is small next to 4 SE at this n.
      INFO(to_string(mode), " ", to_string(m), " mean ", ms.mean, " se ", ms.se, " slope ", slope);
      CHECK(std::abs(ms.mean - slope) <= 4.0 * ms.se + 0.15 * std::abs(slope));
    }
  }
}

TEST_CASE("grad_table: shape, minimum n and determinism") {
  const auto s = setup_for(SimMode::EnergyLoss, 5);
  const auto rows = grad_table(s, 2.5, 2, kAllMethods);
  CHECK(rows.size() == 4);
  for (const auto& r : rows) CHECK(r.stats.n == 2);
  CHECK_THROWS_AS(grad_table(s, 2.5, 1, kAllMethods), std::invalid_argument);
  const auto a = grad_table(s, 2.5, 40, kAllMethods);
  const auto b = grad_table(s, 2.5, 40, kAllMethods);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(testing::bits_of(a[i].stats.mean) == testing::bits_of(b[i].stats.mean));
    CHECK(testing::bits_of(a[i].stats.std) == testing::bits_of(b[i].stats.std));
  }
}

TEST_CASE("optimize: trace shape and argument checks") {
  const auto s = setup_for(SimMode::Shower, 4);
  OptimizeOptions o;
  o.replicas = 2;
  o.steps = 5;
  const auto runs = optimize(s, Method::StochAD, o);
  REQUIRE(runs.size() == 2);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    CHECK(runs[r].replica_id == r);
    CHECK(runs[r].seed == s.seed + r);
    CHECK(runs[r].theta_trace.size() == 6);
    CHECK(runs[r].loss_trace.size() == 6);
    CHECK(runs[r].theta_trace.front() == o.theta_init);
    for (double t : runs[r].theta_trace) CHECK((t >= o.theta_min && t <= o.theta_max));
  }
  o.steps = 0;
  CHECK_THROWS_AS(optimize(s, Method::StochAD, o), std::invalid_argument);
  o.steps = 5;
  o.batch = 1;
  CHECK_THROWS_AS(optimize(s, Method::ScoreBaseline, o), std::invalid_argument);
  CHECK_NOTHROW(optimize(s, Method::Score, o));
}

TEST_CASE("optimize: leaving the bounds is clamped and counted") {
  auto s = setup_for(SimMode::Shower, 6);
  OptimizeOptions o;
  o.replicas = 1;
  o.steps = 20;
  o.theta_init = 0.52;
  o.theta_min = 0.5;
  o.adam.lr = 0.05;
  const auto run = optimize(s, Method::StochAD, o).at(0);
  for (double t : run.theta_trace) CHECK(t >= 0.5);
  o.theta_init = 3.0;
  o.theta_min = 2.95;  // the descent from 3 heads below this floor
  const auto low = optimize(s, Method::StochAD, o).at(0);
  CHECK(low.clamp_events > 0);
  for (double t : low.theta_trace) CHECK(t >= 2.95);
}

TEST_CASE("optimize: stochastic AD descends from theta = 3") {
  const auto s = setup_for(SimMode::Shower, 2);
  OptimizeOptions o;
  o.replicas = 3;
  o.steps = 150;
  o.adam.lr = 0.02;
  for (const auto& run : optimize(s, Method::StochAD, o)) CHECK(run.theta_trace.back() < 2.7);
}

TEST_CASE("results do not depend on the thread count") {
  const auto s = setup_for(SimMode::Shower, 9);
  const int saved = omp_get_max_threads();
  std::vector<std::vector<double>> means;
  for (int threads : {1, 2, 8}) {
    omp_set_num_threads(threads);
    std::vector<double> m;
    for (const auto& r : grad_table(s, 2.0, 64, kAllMethods)) m.push_back(r.stats.mean);
    OptimizeOptions o;
    o.replicas = 3;
    o.steps = 4;
    for (const auto& run : optimize(s, Method::StochAD, o)) m.push_back(run.theta_trace.back());
    m.push_back(expected_loss(s, 2.0, 64, evaluation_tag()));
    means.push_back(m);
  }
  omp_set_num_threads(saved);
  for (std::size_t k = 1; k < means.size(); ++k) {
    REQUIRE(means[k].size() == means[0].size());
    for (std::size_t i = 0; i < means[0].size(); ++i) CHECK(testing::bits_of(means[k][i]) == testing::bits_of(means[0][i]));
  }
}
