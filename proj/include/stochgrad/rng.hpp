#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace stochgrad {

/// Independent sub-streams owned by one program evaluation.
enum class Lane : std::uint32_t {
  Primal = 0,       // omega draws of the primal run
  Pruning = 1,      // alternative selection
  Fallback = 2,     // alternative draws not covered by the FIFO
  Setup = 3,        // initial conditions (start direction)
};

/// Mixes an ordered list of integers into a 64-bit stream identifier.
std::uint64_t derive_stream(std::initializer_list<std::uint64_t> parts);

/**
 * Seeded uniform stream. Identical (seed, stream_id, lane) triples give
 * bit-identical sequences on every platform: the engine is mt19937_64
 * and the conversion to [0, 1) takes the top 53 bits.
 */
class RunRng {
 public:
  RunRng(std::uint64_t seed, std::uint64_t stream_id, Lane lane = Lane::Primal);

  /// Unit-uniform draw in [0, 1).
  double uniform();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  Lane lane() const noexcept { return lane_; }
  std::uint64_t draw_counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Lane lane_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
};

/// Identity of one program evaluation: every lane is derived from it.
struct EventKey {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RunRng lane(Lane l) const { return RunRng(seed, stream_id, l); }
};

}  // namespace stochgrad
