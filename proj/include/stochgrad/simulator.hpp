#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochgrad/draws.hpp"
#include "stochgrad/dual.hpp"

namespace stochgrad {

class InvalidPosition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(std::size_t step, const std::string& what)
      : std::runtime_error("simulation diverged at step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

struct Vec2 {
  double x0 = 0.0;
  double x1 = 0.0;

  double norm() const;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Material-map parameters. Only the inner radius carries a tangent.
struct DetectorParams {
  Dual theta_R{2.5, 1.0};  // m
  double sharpness = 5.0;
  double seg_freq = 12.0;  // rad^-1
  double r_max = 3.0;      // m

  void validate() const;

  DetectorParams with_theta(const Dual& theta) const {
    DetectorParams p = *this;
    p.theta_R = theta;
    return p;
  }
};

/**
 * EnergyLoss: every interaction costs `eloss`.
 * Shower: every interaction splits the particle into two half-energy daughters.
 * Mixed: the split decision is itself a Bernoulli draw with the same probability.
 */
enum class SimMode { EnergyLoss, Shower, Mixed };

const char* to_string(SimMode m);
SimMode parse_sim_mode(const std::string& s);

struct SimConfig {
  SimMode mode = SimMode::EnergyLoss;
  double step_size = 0.005;     // m
  double e_init = 25.0;         // GeV
  double e_threshold = 0.5;     // GeV
  double eloss = 1.0;           // GeV
  double opening_angle = 0.1;   // rad
  double target_radius = 2.0;   // m
  std::size_t max_steps = 2000;
  double world_radius = 8.0;    // m
  Vec2 start_pos{0.01, 0.0};
  // Start direction angle; drawn uniformly in [0, 2pi) when absent.
  std::optional<double> fixed_direction;

  void validate() const;
};

struct ParticleState {
  Vec2 pos;
  Vec2 dir{1.0, 0.0};
  double energy = 0.0;
  int id = 0;
  int parent = -1;
};

struct Hit {
  Vec2 pos;
  double r = 0.0;
  std::size_t step_index = 0;
};

enum class Termination { AllBelowThreshold, MaxSteps, LeftWorld };

const char* to_string(Termination t);

struct Event {
  std::vector<Hit> hits;
  double score_tangent = 0.0;
  std::size_t n_steps = 0;
  Termination terminated_by = Termination::MaxSteps;
  std::uint64_t draws = 0;

  // Energy bookkeeping (GeV).
  double deposited_energy = 0.0;  // eloss interactions
  double stopped_energy = 0.0;    // particles that fell below threshold
  double escaped_energy = 0.0;    // particles that left the world
  double residual_energy = 0.0;   // particles still alive at max_steps

  bool no_hit() const noexcept { return hits.empty(); }
};

/// Polyline of one particle, for event displays.
struct Track {
  int id = 0;
  int parent = -1;
  std::vector<Vec2> points;
};

/**
 * Interaction probability at `pos`:
 *   m = 1/2 * s(b (r - R)) * s(-b sin(w (phi + 2r))) * s(-b cos(w (r - 2))) * s(-b (r - R - Rmax))
 * with s the logistic function, r = |pos|, phi = atan(x0 / x1) and R the
 * inner radius. Values lie in (0, 1/2).
 */
Dual material_map(const Vec2& pos, const DetectorParams& params);

ParticleState propagate(const ParticleState& p, double step_size);

std::pair<ParticleState, ParticleState> split(const ParticleState& p, double opening_angle);

/// Runs one event. Every discrete draw goes through `draws`.
Event simulate_event(const SimConfig& config, const DetectorParams& params, DrawSource& draws,
                     std::vector<Track>* tracks = nullptr);

struct AlternativeRun {
  Event event;
  std::size_t divergence_step = 0;
  std::uint64_t coupled_draws = 0;
  std::uint64_t fresh_draws = 0;
};

/**
 * Re-executes the event with one flipped Bernoulli outcome. Draws before the
 * divergence replay the primal trace, so the pre-divergence trajectory is the
 * primal's; later draws come from the per-step omega FIFO.
 */
AlternativeRun run_alternative(const SimConfig& config, const DetectorParams& params, const EventKey& key,
                               const OmegaTrace& primal_trace, Divergence divergence, bool coupling = true,
                               std::vector<Track>* tracks = nullptr);

/// Mean squared deviation of hit radii from the target; `no_hit_value` for empty events.
double hit_loss(const std::vector<Hit>& hits, double target_radius, double no_hit_value);

/// Design loss with the no-hit sentinel world_radius^2.
double loss(const Event& event, const SimConfig& config);

}  // namespace stochgrad
