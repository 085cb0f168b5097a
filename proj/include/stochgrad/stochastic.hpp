#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "stochgrad/dual.hpp"
#include "stochgrad/rng.hpp"

namespace stochgrad {

class InvalidProbability : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lower/upper clamp applied to interaction probabilities before sampling.
inline constexpr double kProbabilityFloor = 1e-9;

/**
 * Clamps p into [floor, 1 - floor]. A clamped probability no longer depends
 * on the parameter, so its tangent is zeroed.
 */
Dual clamp_probability(const Dual& p, double floor = kProbabilityFloor);

/// A flipped outcome of one Bernoulli draw together with its derivative weight.
struct DiscreteAlternative {
  int flipped_value = 0;
  double weight = 0.0;
  std::uint64_t draw_id = 0;
};

struct BernoulliDraw {
  int outcome = 0;
  DiscreteAlternative alternative;
};

/**
 * Inversion-method Bernoulli: outcome = H(omega > 1 - p).
 *
 * Raising p lowers the boundary 1 - p, which turns outcome 0 into 1 at rate
 * p' / (1 - p); lowering p turns 1 into 0 at rate -p' / p. The other outcome
 * has no alternative and gets weight 0. Weights are therefore never
 * negative: the direction of the change is carried by the flipped value.
 */
BernoulliDraw bernoulli_stochastic(const Dual& p, double omega, std::uint64_t draw_id = 0);

/// d log P(outcome) / d theta for a Bernoulli draw with probability p.
inline double bernoulli_score(const Dual& p, int outcome) {
  return outcome ? p.tangent / p.value : -p.tangent / (1.0 - p.value);
}

/**
 * Single-pass weighted reservoir over discrete alternatives.
 *
 * Keeps one candidate with probability |w_i| / sum_j |w_j|. The carried
 * weight sign(w_chosen) * sum_j |w_j| keeps the estimate unbiased for
 * mixed-sign candidate sets.
 */
struct PruningState {
  std::optional<DiscreteAlternative> chosen;
  double total_abs_weight = 0.0;
  RunRng* rng = nullptr;
  std::uint64_t replacements = 0;

  explicit PruningState(RunRng* r = nullptr) : rng(r) {}
};

void prune_consider(PruningState& state, const DiscreteAlternative& candidate);

std::optional<double> pruned_weight(const PruningState& state);

}  // namespace stochgrad
