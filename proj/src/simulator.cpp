#include "stochgrad/simulator.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace stochgrad {

namespace {

// Phase offset of the radial segmentation term.
constexpr double kRadialPhase = 2.0;

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x0 - s * v.x1, s * v.x0 + c * v.x1};
}

bool finite(const ParticleState& p) {
  return std::isfinite(p.pos.x0) && std::isfinite(p.pos.x1) && std::isfinite(p.dir.x0) &&
         std::isfinite(p.dir.x1) && std::isfinite(p.energy);
}

}  // namespace

double Vec2::norm() const { return std::hypot(x0, x1); }

void DetectorParams::validate() const {
  if (!(sharpness > 0.0)) throw std::invalid_argument("sharpness must be > 0");
  if (!(seg_freq > 0.0)) throw std::invalid_argument("seg_freq must be > 0");
  if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be > 0");
  if (!(theta_R.value > 0.0)) throw std::invalid_argument("theta_R must be > 0");
}

const char* to_string(SimMode m) {
  switch (m) {
    case SimMode::EnergyLoss: return "energy-loss";
    case SimMode::Shower: return "shower";
    case SimMode::Mixed: return "mixed";
  }
  return "?";
}

SimMode parse_sim_mode(const std::string& s) {
  if (s == "energy-loss" || s == "eloss") return SimMode::EnergyLoss;
  if (s == "shower") return SimMode::Shower;
  if (s == "mixed") return SimMode::Mixed;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

void SimConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
  if (!(e_threshold > 0.0)) throw std::invalid_argument("e_threshold must be > 0");
  if (!(eloss > 0.0)) throw std::invalid_argument("eloss must be > 0");
  if (!(e_init > 0.0)) throw std::invalid_argument("e_init must be > 0");
  if (!(world_radius > 0.0)) throw std::invalid_argument("world_radius must be > 0");
  if (!(opening_angle >= 0.0)) throw std::invalid_argument("opening_angle must be >= 0");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be >= 1");
  if (start_pos.norm() >= world_radius) throw std::invalid_argument("start position outside the world");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::AllBelowThreshold: return "all_below_threshold";
    case Termination::MaxSteps: return "max_steps";
    case Termination::LeftWorld: return "left_world";
  }
  return "?";
}

Dual material_map(const Vec2& pos, const DetectorParams& params) {
  if (pos.x0 == 0.0 && pos.x1 == 0.0) throw InvalidPosition("material_map: position at the origin");
  const Dual x0 = Dual::constant(pos.x0);
  const Dual x1 = Dual::constant(pos.x1);
  const Dual r = sqrt(x0 * x0 + x1 * x1);
  const Dual phi = atan2(x0, x1);
  const double b = params.sharpness;
  const double w = params.seg_freq;
  const Dual m_start = sigmoid(b * (r - params.theta_R));
  const Dual m_phi = sigmoid(-b * sin(w * (phi + 2.0 * r)));
  const Dual m_r = sigmoid(-b * cos(w * (r - kRadialPhase)));
  const Dual m_end = sigmoid(-b * (r - params.theta_R - params.r_max));
  return 0.5 * (m_start * m_phi * m_r * m_end);
}

ParticleState propagate(const ParticleState& p, double step_size) {
  ParticleState out = p;
  out.pos.x0 += step_size * p.dir.x0;
  out.pos.x1 += step_size * p.dir.x1;
  return out;
}

std::pair<ParticleState, ParticleState> split(const ParticleState& p, double opening_angle) {
  ParticleState left = p;
  ParticleState right = p;
  left.energy = right.energy = 0.5 * p.energy;
  left.dir = rotate(p.dir, 0.5 * opening_angle);
  right.dir = rotate(p.dir, -0.5 * opening_angle);
  left.parent = right.parent = p.id;
  return {left, right};
}

Event simulate_event(const SimConfig& config, const DetectorParams& params, DrawSource& draws,
                     std::vector<Track>* tracks) {
  Event ev;
  int next_id = 0;

  ParticleState start;
  start.pos = config.start_pos;
  const double angle =
      config.fixed_direction ? *config.fixed_direction : 2.0 * std::numbers::pi * draws.setup_uniform();
  start.dir = {std::cos(angle), std::sin(angle)};
  start.energy = config.e_init;
  start.id = next_id++;

  auto open_track = [&](const ParticleState& p) {
    if (tracks != nullptr) tracks->push_back({p.id, p.parent, {p.pos}});
  };
  auto extend_track = [&](const ParticleState& p) {
    if (tracks == nullptr) return;
    for (auto it = tracks->rbegin(); it != tracks->rend(); ++it) {
      if (it->id == p.id) {
        it->points.push_back(p.pos);
        return;
      }
    }
  };

  std::vector<ParticleState> live{start};
  std::vector<ParticleState> next;
  open_track(start);
  bool any_escaped = false;

  // Particles below threshold are retired when created rather than at the
  // top of the next step; the hits are the same and the loop ends sooner.
  auto keep_or_stop = [&](const ParticleState& p) {
    if (p.energy < config.e_threshold) {
      ev.stopped_energy += p.energy;
    } else {
      next.push_back(p);
    }
  };

  std::size_t step = 0;
  for (; step < config.max_steps && !live.empty(); ++step) {
    draws.begin_step(step);
    next.clear();
    for (const ParticleState& current : live) {
      ParticleState p = propagate(current, config.step_size);
      if (!finite(p)) throw SimulationDiverged(step, "non-finite particle state");
      extend_track(p);
      const double r = p.pos.norm();
      if (r >= config.world_radius) {
        ev.escaped_energy += p.energy;
        any_escaped = true;
        continue;
      }
      const Dual m = material_map(p.pos, params);
      if (!m.finite()) throw SimulationDiverged(step, "non-finite material map");
      if (!draws.bernoulli(m)) {
        next.push_back(p);
        continue;
      }
      ev.hits.push_back({p.pos, r, step});
      bool splits = config.mode == SimMode::Shower;
      if (config.mode == SimMode::Mixed) splits = draws.bernoulli(m) != 0;
      if (splits) {
        auto [left, right] = split(p, config.opening_angle);
        left.id = next_id++;
        right.id = next_id++;
        open_track(left);
        open_track(right);
        keep_or_stop(left);
        keep_or_stop(right);
      } else {
        p.energy -= config.eloss;
        ev.deposited_energy += config.eloss;
        keep_or_stop(p);
      }
    }
    live.swap(next);
  }

  for (const auto& p : live) ev.residual_energy += p.energy;
  ev.n_steps = step;
  if (!live.empty()) {
    ev.terminated_by = Termination::MaxSteps;
  } else {
    ev.terminated_by = any_escaped ? Termination::LeftWorld : Termination::AllBelowThreshold;
  }
  ev.score_tangent = draws.score_tangent();
  ev.draws = draws.draws();
  if (!std::isfinite(ev.score_tangent)) throw SimulationDiverged(step, "non-finite score");
  return ev;
}

AlternativeRun run_alternative(const SimConfig& config, const DetectorParams& params, const EventKey& key,
                               const OmegaTrace& primal_trace, Divergence divergence, bool coupling,
                               std::vector<Track>* tracks) {
  AlternativeDraws draws(key, primal_trace, divergence, coupling);
  AlternativeRun out;
  out.event = simulate_event(config, params, draws, tracks);
  if (!draws.diverged()) throw std::logic_error("run_alternative: divergence draw never reached");
  out.divergence_step = draws.divergence_step();
  out.coupled_draws = draws.coupled_draws();
  out.fresh_draws = draws.fresh_draws();
  return out;
}

double hit_loss(const std::vector<Hit>& hits, double target_radius, double no_hit_value) {
  if (hits.empty()) return no_hit_value;
  double acc = 0.0;
  for (const Hit& h : hits) {
    const double d = h.r - target_radius;
    acc += d * d;
  }
  return acc / static_cast<double>(hits.size());
}

double loss(const Event& event, const SimConfig& config) {
  return hit_loss(event.hits, config.target_radius, config.world_radius * config.world_radius);
}

}  // namespace stochgrad
