#include "stochgrad/draws.hpp"

#include <algorithm>

namespace stochgrad {

std::size_t OmegaTrace::step_of(std::size_t draw_id) const {
  // Last step whose first draw id is <= draw_id.
  auto it = std::upper_bound(step_offsets_.begin(), step_offsets_.end(), draw_id);
  if (it == step_offsets_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(step_offsets_.begin(), it) - 1);
}

int DrawSource::bernoulli(const Dual& p_raw) {
  const Dual p = clamp_probability(p_raw);
  const std::uint64_t id = next_id_++;
  const auto [outcome, coupled] = sample(p, id);
  score_ += bernoulli_score(p, outcome);
  if (log_ != nullptr) log_->push_back({id, step_, p, outcome, coupled});
  return outcome;
}

PrimalDraws::PrimalDraws(const EventKey& key, bool track_alternatives)
    : omega_(key.lane(Lane::Primal)),
      prune_rng_(key.lane(Lane::Pruning)),
      setup_(key.lane(Lane::Setup)),
      track_(track_alternatives),
      pruning_(&prune_rng_) {}

std::pair<int, bool> PrimalDraws::sample(const Dual& p, std::uint64_t id) {
  const double omega = omega_.uniform();
  trace_.record(omega);
  const BernoulliDraw d = bernoulli_stochastic(p, omega, id);
  if (track_) {
    prune_consider(pruning_, d.alternative);
    if (candidates_ != nullptr) candidates_->push_back(d.alternative);
  }
  return {d.outcome, true};
}

AlternativeDraws::AlternativeDraws(const EventKey& key, const OmegaTrace& primal, Divergence divergence,
                                   bool coupling)
    : primal_(primal),
      divergence_(divergence),
      coupling_(coupling),
      fallback_(key.lane(Lane::Fallback)),
      setup_(key.lane(Lane::Setup)) {}

void AlternativeDraws::on_begin_step(std::size_t step) {
  if (!diverged_) return;
  fifo_.clear();
  if (coupling_) {
    const auto [first, last] = primal_.step_range(step);
    fifo_.push(primal_.slice(first, last));
  }
}

std::pair<int, bool> AlternativeDraws::sample(const Dual& p, std::uint64_t id) {
  if (!diverged_) {
    if (id < divergence_.draw_id) {
      // Identical state up to here, so the primal omega reproduces the primal outcome.
      return {primal_.omega(id) > 1.0 - p.value ? 1 : 0, true};
    }
    diverged_ = true;
    divergence_step_ = step();
    fifo_.clear();
    if (coupling_) {
      const auto [first, last] = primal_.step_range(divergence_step_);
      const std::size_t from = std::min<std::size_t>(id + 1, last);
      fifo_.push(primal_.slice(std::max(from, first), last));
    }
    return {divergence_.flipped_value, true};
  }
  const CoupledOmega w = fifo_.pop_or_draw(fallback_);
  if (w.coupled) {
    ++coupled_;
  } else {
    ++fresh_;
  }
  return {w.omega > 1.0 - p.value ? 1 : 0, w.coupled};
}

}  // namespace stochgrad
