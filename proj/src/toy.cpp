#include "stochgrad/toy.hpp"

namespace stochgrad::toy {

Program single_bernoulli() {
  return [](const Dual& theta, DrawSource& draws) {
    draws.begin_step(0);
    return Dual::constant(draws.bernoulli(theta));
  };
}

Dual smooth_term(const Dual& theta) { return theta * theta; }

Dual flip_probability(const Dual& theta) { return sigmoid(theta); }

Program independent_flip() {
  return [](const Dual& theta, DrawSource& draws) {
    draws.begin_step(0);
    const int b = draws.bernoulli(Dual::constant(0.5));
    return smooth_term(theta) + static_cast<double>(b);
  };
}

Program dependent_flip() {
  return [](const Dual& theta, DrawSource& draws) {
    draws.begin_step(0);
    const int b = draws.bernoulli(flip_probability(theta));
    return smooth_term(theta) + static_cast<double>(b);
  };
}

Program bernoulli_chain(int steps, int draws_per_step) {
  return [steps, draws_per_step](const Dual& theta, DrawSource& draws) {
    int successes = 0;
    double acc = 0.0;
    for (int s = 0; s < steps; ++s) {
      draws.begin_step(static_cast<std::size_t>(s));
      for (int k = 0; k < draws_per_step; ++k) {
        const Dual p = sigmoid(theta - 0.5 * successes + 0.3 * k);
        const int b = draws.bernoulli(p);
        successes += b;
        acc += b * (1.0 + s);
      }
    }
    return Dual::constant(acc);
  };
}

}  // namespace stochgrad::toy
