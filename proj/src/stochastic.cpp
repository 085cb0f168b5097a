#include "stochgrad/stochastic.hpp"

#include <cmath>
#include <string>

namespace stochgrad {

Dual clamp_probability(const Dual& p, double floor) {
  if (p.value < floor) return Dual::constant(floor);
  if (p.value > 1.0 - floor) return Dual::constant(1.0 - floor);
  return p;
}

BernoulliDraw bernoulli_stochastic(const Dual& p, double omega, std::uint64_t draw_id) {
  if (!(p.value > 0.0 && p.value < 1.0)) {
    throw InvalidProbability("bernoulli: probability " + std::to_string(p.value) +
                             " outside (0, 1)");
  }
  BernoulliDraw d;
  d.outcome = omega > 1.0 - p.value ? 1 : 0;
  d.alternative.draw_id = draw_id;
  d.alternative.flipped_value = 1 - d.outcome;
  // The boundary 1 - p only moves one way, so only one outcome can flip.
  if (d.outcome == 0 && p.tangent > 0.0) {
    d.alternative.weight = p.tangent / (1.0 - p.value);
  } else if (d.outcome == 1 && p.tangent < 0.0) {
    d.alternative.weight = -p.tangent / p.value;
  }
  return d;
}

void prune_consider(PruningState& state, const DiscreteAlternative& candidate) {
  const double w = std::abs(candidate.weight);
  if (w == 0.0) return;
  state.total_abs_weight += w;
  if (!state.chosen) {
    state.chosen = candidate;
    ++state.replacements;
    return;
  }
  if (state.rng == nullptr) throw std::logic_error("prune_consider: no pruning stream attached");
  if (state.rng->uniform() * state.total_abs_weight < w) {
    state.chosen = candidate;
    ++state.replacements;
  }
}

std::optional<double> pruned_weight(const PruningState& state) {
  if (!state.chosen) return std::nullopt;
  return std::copysign(state.total_abs_weight, state.chosen->weight);
}

}  // namespace stochgrad
