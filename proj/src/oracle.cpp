#include "stochgrad/oracle.hpp"

#include <string>

namespace stochgrad {

namespace {

// Replays a fixed outcome prefix; draws past the prefix take outcome 0.
class ForcedDraws final : public DrawSource {
 public:
  ForcedDraws(const std::vector<int>& prefix, std::size_t max_draws) : prefix_(prefix), max_draws_(max_draws) {}

  double setup_uniform() override {
    throw std::logic_error("enumeration needs deterministic initial conditions (set a fixed direction)");
  }

  const std::vector<int>& outcomes() const noexcept { return outcomes_; }
  const Dual& probability() const noexcept { return probability_; }

 protected:
  std::pair<int, bool> sample(const Dual& p, std::uint64_t id) override {
    if (id >= max_draws_) {
      throw InstanceTooLarge("enumeration: path needs more than " + std::to_string(max_draws_) + " draws");
    }
    const int outcome = id < prefix_.size() ? prefix_[id] : 0;
    outcomes_.push_back(outcome);
    probability_ *= outcome ? p : 1.0 - p;
    return {outcome, true};
  }

 private:
  const std::vector<int>& prefix_;
  std::size_t max_draws_;
  std::vector<int> outcomes_;
  Dual probability_ = Dual::constant(1.0);
};

}  // namespace

double Enumeration::total_probability() const {
  double acc = 0.0;
  for (const auto& p : paths) acc += p.probability.value;
  return acc;
}

Enumeration enumerate_outcomes(const Program& program, const Dual& theta, std::size_t max_draws) {
  Enumeration result;
  result.expectation = Dual::constant(0.0);
  std::vector<int> prefix;
  for (;;) {
    ForcedDraws draws(prefix, max_draws);
    const Dual f = program(theta, draws);
    OutcomePath path{draws.outcomes(), draws.probability(), f};
    result.expectation += path.probability * path.output;

    // Next path in depth-first order: flip the deepest 0 to 1 and truncate.
    std::vector<int> next = path.outcomes;
    result.paths.push_back(std::move(path));
    while (!next.empty() && next.back() == 1) next.pop_back();
    if (next.empty()) break;
    next.back() = 1;
    prefix = std::move(next);
  }
  return result;
}

double exact_gradient(const Program& program, double theta, std::size_t max_draws) {
  return enumerate_outcomes(program, Dual::variable(theta), max_draws).expectation.tangent;
}

double exact_expectation(const Program& program, double theta, std::size_t max_draws) {
  return enumerate_outcomes(program, Dual::constant(theta), max_draws).expectation.value;
}

SimConfig tiny_energy_loss_config() {
  SimConfig c;
  c.mode = SimMode::EnergyLoss;
  c.e_init = 2.0;
  c.eloss = 1.0;
  c.e_threshold = 0.5;
  c.step_size = 0.25;
  c.max_steps = 12;
  c.fixed_direction = 0.0;
  return c;
}

DetectorParams tiny_energy_loss_params() {
  DetectorParams p;
  p.theta_R = Dual::variable(1.5);
  p.sharpness = 3.0;
  return p;
}

}  // namespace stochgrad
