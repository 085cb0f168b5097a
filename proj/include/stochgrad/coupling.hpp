#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "stochgrad/rng.hpp"

namespace stochgrad {

/// Result of pulling an omega for the alternative run.
struct CoupledOmega {
  double omega = 0.0;
  bool coupled = false;
};

/**
 * First-in first-out store of primal omega values for one time step.
 * Pops fall back to fresh draws from the caller's stream once exhausted.
 */
class OmegaFifo {
 public:
  void push(double omega) { queue_.push_back(omega); }

  void push(std::span<const double> omegas) { queue_.insert(queue_.end(), omegas.begin(), omegas.end()); }

  CoupledOmega pop_or_draw(RunRng& fallback) {
    if (head_ < queue_.size()) return {queue_[head_++], true};
    return {fallback.uniform(), false};
  }

  /// Step boundary: drop anything left over.
  void clear() {
    queue_.clear();
    head_ = 0;
  }

  std::size_t pending() const noexcept { return queue_.size() - head_; }

 private:
  std::vector<double> queue_;
  std::size_t head_ = 0;
};

/// Every omega consumed by a primal run, grouped by time step.
class OmegaTrace {
 public:
  void begin_step(std::size_t step) {
    // Steps are entered in order; skipped steps get empty ranges.
    while (step_offsets_.size() <= step) step_offsets_.push_back(omegas_.size());
  }

  void record(double omega) { omegas_.push_back(omega); }

  std::size_t size() const noexcept { return omegas_.size(); }
  std::size_t steps() const noexcept { return step_offsets_.size(); }
  double omega(std::size_t draw_id) const { return omegas_.at(draw_id); }

  /// [first, last) draw ids of a step; empty for steps the primal never reached.
  std::pair<std::size_t, std::size_t> step_range(std::size_t step) const {
    if (step >= step_offsets_.size()) return {omegas_.size(), omegas_.size()};
    const std::size_t last = step + 1 < step_offsets_.size() ? step_offsets_[step + 1] : omegas_.size();
    return {step_offsets_[step], last};
  }

  std::size_t step_of(std::size_t draw_id) const;

  std::span<const double> slice(std::size_t first, std::size_t last) const {
    return std::span<const double>(omegas_).subspan(first, last - first);
  }

 private:
  std::vector<double> omegas_;
  std::vector<std::size_t> step_offsets_;
};

}  // namespace stochgrad
