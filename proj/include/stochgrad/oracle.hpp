#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stochgrad/dual.hpp"
#include "stochgrad/estimators.hpp"

namespace stochgrad {

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxDraws = 14;

/// One complete outcome sequence of a program.
struct OutcomePath {
  std::vector<int> outcomes;
  Dual probability;  // product of p or (1 - p) over the draws, with tangent
  Dual output;
};

struct Enumeration {
  std::vector<OutcomePath> paths;
  Dual expectation;  // sum of P(path) * f(path), tangent included

  double total_probability() const;
};

/**
 * Brute-force enumeration of every discrete outcome sequence of `program`.
 * Each path is obtained by re-running the program with forced outcomes, so
 * probabilities are the same clamped values the estimators see. Throws
 * InstanceTooLarge when any path needs more than `max_draws` draws.
 */
Enumeration enumerate_outcomes(const Program& program, const Dual& theta, std::size_t max_draws = kDefaultMaxDraws);

/// d/dtheta E[f] evaluated exactly over the enumeration.
double exact_gradient(const Program& program, double theta, std::size_t max_draws = kDefaultMaxDraws);

/// E[f] at theta (no tangent).
double exact_expectation(const Program& program, double theta, std::size_t max_draws = kDefaultMaxDraws);

/**
 * Small energy-loss configuration whose paths stay within the default draw
 * budget: fixed direction along x0, coarse steps straddling the inner radius.
 */
SimConfig tiny_energy_loss_config();
DetectorParams tiny_energy_loss_params();

}  // namespace stochgrad
