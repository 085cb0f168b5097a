#include <doctest.h>

#include <cmath>

#include "stochgrad/oracle.hpp"
#include "stochgrad/toy.hpp"

using namespace stochgrad;

namespace {

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

double central_fd(const Program& prog, double theta, double h = 1e-5) {
  return (exact_expectation(prog, theta + h) - exact_expectation(prog, theta - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("oracle: toy programs have closed forms") {
  for (double theta : {-1.0, 0.2, 0.5, 0.8, 2.0}) {
    const double s = logistic(theta);
    CHECK(exact_expectation(toy::dependent_flip(), theta) == doctest::Approx(theta * theta + s).epsilon(1e-12));
    CHECK(exact_gradient(toy::dependent_flip(), theta) == doctest::Approx(2.0 * theta + s * (1.0 - s)).epsilon(1e-12));
    CHECK(exact_gradient(toy::independent_flip(), theta) == doctest::Approx(2.0 * theta).epsilon(1e-12));
  }
  for (double theta : {0.2, 0.5, 0.8}) {
    CHECK(exact_expectation(toy::single_bernoulli(), theta) == doctest::Approx(theta));
    CHECK(exact_gradient(toy::single_bernoulli(), theta) == doctest::Approx(1.0));
  }
}

TEST_CASE("oracle: path probabilities sum to one") {
  const auto e = enumerate_outcomes(toy::bernoulli_chain(3, 3), Dual::variable(0.3));
  CHECK(e.paths.size() == 512);
  CHECK(std::abs(e.total_probability() - 1.0) < 1e-10);

  const Program tiny = simulator_loss_program(tiny_energy_loss_config(), tiny_energy_loss_params());
  const auto t = enumerate_outcomes(tiny, Dual::variable(1.5));
  CHECK(t.paths.size() > 4);
  CHECK(std::abs(t.total_probability() - 1.0) < 1e-10);
  double dsum = 0.0;
  for (const auto& p : t.paths) dsum += p.probability.tangent;
  CHECK(std::abs(dsum) < 1e-10);
}

TEST_CASE("oracle: exact gradient matches differences of the exact expectation") {
  const Program chain = toy::bernoulli_chain(3, 2);
  for (double theta : {-0.5, 0.0, 0.7}) {
    CHECK(std::abs(exact_gradient(chain, theta) - central_fd(chain, theta)) < 1e-6);
  }
  const Program tiny = simulator_loss_program(tiny_energy_loss_config(), tiny_energy_loss_params());
  for (double theta : {1.0, 1.5, 2.0}) {
    CHECK(std::abs(exact_gradient(tiny, theta) - central_fd(tiny, theta)) < 1e-6);
  }
}

TEST_CASE("oracle: refuses instances beyond the draw budget") {
  CHECK_THROWS_AS(enumerate_outcomes(toy::bernoulli_chain(4, 4), Dual::variable(0.0)), InstanceTooLarge);
  CHECK_NOTHROW(enumerate_outcomes(toy::bernoulli_chain(4, 4), Dual::variable(0.0), 16));
}
