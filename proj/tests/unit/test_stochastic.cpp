#include <doctest.h>

#include <cmath>
#include <vector>

#include "checks.hpp"
#include "stochgrad/estimators.hpp"
#include "stochgrad/stochastic.hpp"
#include "stochgrad/toy.hpp"

using namespace stochgrad;

TEST_CASE("bernoulli: outcome follows the inversion boundary") {
  const auto low = bernoulli_stochastic(Dual{0.5, 1.0}, 0.1, 4);
  CHECK(low.outcome == 0);
  CHECK(low.alternative.flipped_value == 1);
  CHECK(low.alternative.weight == doctest::Approx(2.0));
  CHECK(low.alternative.draw_id == 4);

  // Raising p cannot turn a 1 into a 0: no alternative for this outcome.
  const auto high = bernoulli_stochastic(Dual{0.5, 1.0}, 0.9);
  CHECK(high.outcome == 1);
  CHECK(high.alternative.flipped_value == 0);
  CHECK(high.alternative.weight == 0.0);

  // Lowering p does.
  const auto falling = bernoulli_stochastic(Dual{0.5, -1.0}, 0.9);
  CHECK(falling.outcome == 1);
  CHECK(falling.alternative.flipped_value == 0);
  CHECK(falling.alternative.weight == doctest::Approx(2.0));

  for (double omega : {0.0, 0.3, 0.69, 0.71, 0.999}) {
    const auto d = bernoulli_stochastic(Dual{0.3, 0.0}, omega);
    CHECK(d.alternative.weight == 0.0);
    CHECK(d.outcome == (omega > 0.7 ? 1 : 0));
    CHECK(d.alternative.flipped_value != d.outcome);
  }
}

TEST_CASE("bernoulli: probabilities outside (0, 1) are rejected") {
  CHECK_THROWS_AS(bernoulli_stochastic(Dual{0.0, 1.0}, 0.5), InvalidProbability);
  CHECK_THROWS_AS(bernoulli_stochastic(Dual{1.0, 1.0}, 0.5), InvalidProbability);
  CHECK_THROWS_AS(bernoulli_stochastic(Dual{std::nan(""), 1.0}, 0.5), InvalidProbability);
}

TEST_CASE("bernoulli: clamping freezes the tangent") {
  const Dual inside = clamp_probability(Dual{0.3, 2.0});
  CHECK(inside.value == 0.3);
  CHECK(inside.tangent == 2.0);
  const Dual low = clamp_probability(Dual{1e-12, 5.0});
  CHECK(low.value == kProbabilityFloor);
  CHECK(low.tangent == 0.0);
  const Dual high = clamp_probability(Dual{1.0, 5.0});
  CHECK(high.value == 1.0 - kProbabilityFloor);
  CHECK(high.tangent == 0.0);
}

TEST_CASE("bernoulli: single-draw estimate has mean p'") {
  // Per-sample value is p'/(1-p) after a 0 and 0 after a 1.
  const double theta = 0.3;
  const auto keys = event_keys(5, 1, 20000);
  const auto samples = stochad_gradient(toy::single_bernoulli(), Dual::variable(theta), keys);
  std::vector<double> v;
  for (const auto& s : samples) {
    const bool zero = s.loss == 0.0;
    CHECK(s.value == doctest::Approx(zero ? 1.0 / (1.0 - theta) : 0.0));
    v.push_back(s.value);
  }
  CHECK(testing::within_3se(testing::mean_se(v), 1.0));
}

TEST_CASE("pruning: examples") {
  RunRng rng(1, 1, Lane::Pruning);
  PruningState st(&rng);
  CHECK_FALSE(pruned_weight(st).has_value());

  prune_consider(st, {1, 0.5, 0});
  REQUIRE(st.chosen.has_value());
  CHECK(st.chosen->draw_id == 0);
  CHECK(st.total_abs_weight == 0.5);

  PruningState full(&rng);
  prune_consider(full, {1, 1.0, 3});
  prune_consider(full, {0, 0.0, 4});
  CHECK(full.total_abs_weight == 1.0);
  CHECK(full.chosen->draw_id == 3);

  PruningState single(&rng);
  prune_consider(single, {0, -2.0, 0});
  CHECK(*pruned_weight(single) == -2.0);

  PruningState two;
  two.chosen = DiscreteAlternative{1, 3.0, 1};
  two.total_abs_weight = 4.0;
  CHECK(*pruned_weight(two) == 4.0);

  PruningState mixed;
  mixed.chosen = DiscreteAlternative{1, 1.0, 0};
  mixed.total_abs_weight = 2.0;
  CHECK(*pruned_weight(mixed) == 2.0);
}

TEST_CASE("pruning: zero weights are never chosen") {
  RunRng rng(2, 2, Lane::Pruning);
  PruningState st(&rng);
  prune_consider(st, {1, 0.0, 0});
  CHECK_FALSE(st.chosen.has_value());
  CHECK(st.total_abs_weight == 0.0);
}

TEST_CASE("pruning: selection frequency is proportional to |w|") {
  const int runs = 100000;
  int second = 0;
  for (int i = 0; i < runs; ++i) {
    RunRng rng(9, static_cast<std::uint64_t>(i), Lane::Pruning);
    PruningState st(&rng);
    prune_consider(st, {1, 1.0, 0});
    prune_consider(st, {1, 3.0, 1});
    second += st.chosen->draw_id == 1;
  }
  CHECK(static_cast<double>(second) / runs == doctest::Approx(0.75).epsilon(0.01 / 0.75));
}

TEST_CASE("pruning: carried weight keeps the estimate unbiased") {
  struct Candidate {
    double w;
    double df;
  };
  const std::vector<std::vector<Candidate>> sets = {
      {{2.0, 1.0}},
      {{1.0, 2.0}, {3.0, -1.0}},
      {{1.0, 1.5}, {-1.0, 0.5}},
      {{0.5, 4.0}, {-2.0, 1.0}, {1.0, -3.0}, {0.25, 2.0}},
  };
  for (const auto& set : sets) {
    double exact = 0.0;
    double total = 0.0;
    for (const auto& c : set) {
      exact += c.w * c.df;
      total += std::abs(c.w);
    }
    const int runs = 50000;
    std::vector<double> est(runs);
    std::vector<int> picks(set.size(), 0);
    for (int i = 0; i < runs; ++i) {
      RunRng rng(17, static_cast<std::uint64_t>(i), Lane::Pruning);
      PruningState st(&rng);
      for (std::size_t k = 0; k < set.size(); ++k) prune_consider(st, {1, set[k].w, k});
      const auto k = st.chosen->draw_id;
      ++picks[k];
      est[i] = *pruned_weight(st) * set[k].df;
      CHECK(st.total_abs_weight == doctest::Approx(total));
    }
    const auto ms = testing::mean_se(est);
    INFO("mean ", ms.mean, " se ", ms.se, " exact ", exact);
    // Several sets are checked at once, so a 4 SE band.
    CHECK(testing::within_se(ms, exact, 4.0));
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double p = std::abs(set[k].w) / total;
      const double sd = std::sqrt(p * (1.0 - p) / runs);
      CHECK(std::abs(picks[k] / static_cast<double>(runs) - p) <= 4.0 * sd + 1e-12);
    }
  }
}
