#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stochgrad/coupling.hpp"
#include "stochgrad/dual.hpp"
#include "stochgrad/rng.hpp"
#include "stochgrad/stochastic.hpp"

namespace stochgrad {

/// One Bernoulli draw as seen by a program run.
struct DrawRecord {
  std::uint64_t draw_id = 0;
  std::size_t step = 0;
  Dual p;
  int outcome = 0;
  bool coupled = true;  // false only for alternative draws not fed by the FIFO
};

/**
 * Supplier of discrete randomness to a stochastic program.
 *
 * Programs call begin_step() at each time-step boundary and bernoulli() for
 * every discrete draw. Probabilities are clamped here, so the score, the
 * alternative weights and the exact oracle all see the same p.
 */
class DrawSource {
 public:
  virtual ~DrawSource() = default;

  void begin_step(std::size_t step) {
    step_ = step;
    on_begin_step(step);
  }

  int bernoulli(const Dual& p_raw);

  /// Uniform draw for initial conditions; identical for primal and alternatives.
  virtual double setup_uniform() = 0;

  double score_tangent() const noexcept { return score_; }
  std::uint64_t draws() const noexcept { return next_id_; }
  std::size_t step() const noexcept { return step_; }

  void set_log(std::vector<DrawRecord>* log) { log_ = log; }

 protected:
  virtual void on_begin_step(std::size_t) {}
  /// Returns (outcome, coupled) for draw `id` with clamped probability p.
  virtual std::pair<int, bool> sample(const Dual& p, std::uint64_t id) = 0;

 private:
  double score_ = 0.0;
  std::uint64_t next_id_ = 0;
  std::size_t step_ = 0;
  std::vector<DrawRecord>* log_ = nullptr;
};

/**
 * Primal run. Draws omega from the primal lane, records the per-step omega
 * trace for the alternative and, when tracking, feeds every discrete
 * alternative to the pruning reservoir.
 */
class PrimalDraws final : public DrawSource {
 public:
  explicit PrimalDraws(const EventKey& key, bool track_alternatives = true);

  PrimalDraws(const PrimalDraws&) = delete;
  PrimalDraws& operator=(const PrimalDraws&) = delete;

  double setup_uniform() override { return setup_.uniform(); }

  const PruningState& pruning() const noexcept { return pruning_; }
  const OmegaTrace& trace() const noexcept { return trace_; }

  /// Keep every candidate alternative (tests and diagnostics).
  void record_candidates(std::vector<DiscreteAlternative>* out) { candidates_ = out; }

 protected:
  void on_begin_step(std::size_t step) override { trace_.begin_step(step); }
  std::pair<int, bool> sample(const Dual& p, std::uint64_t id) override;

 private:
  RunRng omega_;
  RunRng prune_rng_;
  RunRng setup_;
  bool track_;
  PruningState pruning_;
  OmegaTrace trace_;
  std::vector<DiscreteAlternative>* candidates_ = nullptr;
};

/// Where the alternative departs from the primal.
struct Divergence {
  std::uint64_t draw_id = 0;
  int flipped_value = 0;
};

/**
 * Alternative run. Reproduces the primal draws before the divergence from
 * the recorded trace, forces the flipped outcome, then takes omega from the
 * per-step FIFO (primal omegas of the same step) or fresh fallback draws.
 */
class AlternativeDraws final : public DrawSource {
 public:
  AlternativeDraws(const EventKey& key, const OmegaTrace& primal, Divergence divergence, bool coupling = true);

  double setup_uniform() override { return setup_.uniform(); }

  bool diverged() const noexcept { return diverged_; }
  std::size_t divergence_step() const noexcept { return divergence_step_; }
  std::uint64_t coupled_draws() const noexcept { return coupled_; }
  std::uint64_t fresh_draws() const noexcept { return fresh_; }

 protected:
  void on_begin_step(std::size_t step) override;
  std::pair<int, bool> sample(const Dual& p, std::uint64_t id) override;

 private:
  const OmegaTrace& primal_;
  Divergence divergence_;
  bool coupling_;
  RunRng fallback_;
  RunRng setup_;
  OmegaFifo fifo_;
  bool diverged_ = false;
  std::size_t divergence_step_ = 0;
  std::uint64_t coupled_ = 0;
  std::uint64_t fresh_ = 0;
};

}  // namespace stochgrad
