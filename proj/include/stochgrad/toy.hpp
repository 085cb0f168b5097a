#pragma once

#include "stochgrad/estimators.hpp"

// Small programs with known derivatives, used as ground truth.
namespace stochgrad::toy {

/// f = b with b ~ Bernoulli(theta); d/dtheta E[f] = 1.
Program single_bernoulli();

/// Smooth term g(theta) = theta^2.
Dual smooth_term(const Dual& theta);

/// Bernoulli probability h(theta) = logistic(theta).
Dual flip_probability(const Dual& theta);

/// f = g(theta) + b, b ~ Bernoulli(1/2): derivative g'(theta).
Program independent_flip();

/// f = g(theta) + b, b ~ Bernoulli(h(theta)): derivative g'(theta) + h'(theta).
Program dependent_flip();

/**
 * Several time steps of independent Bernoulli draws whose probabilities
 * depend on theta and on the running count of successes. Exercises the
 * FIFO coupling on programs with more than one draw per step.
 */
Program bernoulli_chain(int steps, int draws_per_step);

}  // namespace stochgrad::toy
