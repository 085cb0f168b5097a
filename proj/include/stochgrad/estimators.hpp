#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stochgrad/draws.hpp"
#include "stochgrad/dual.hpp"
#include "stochgrad/rng.hpp"
#include "stochgrad/simulator.hpp"
#include "stochgrad/stats.hpp"

namespace stochgrad {

/**
 * A stochastic program: maps the parameter (as a Dual) to an output, taking
 * all discrete randomness from the supplied DrawSource. The output tangent
 * is the smooth (pathwise) derivative.
 */
using Program = std::function<Dual(const Dual& theta, DrawSource& draws)>;

enum class Method { Numeric, Score, ScoreBaseline, StochAD };

inline constexpr Method kAllMethods[] = {Method::Numeric, Method::Score, Method::ScoreBaseline, Method::StochAD};

const char* to_string(Method m);
Method parse_method(const std::string& s);

struct EstimatorOptions {
  double fd_eps = 0.01;         // m
  bool fd_central = false;      // central instead of forward differences
  bool fd_common_seed = false;  // reuse the event's streams for the perturbed run
  bool coupling = true;         // FIFO omega reuse in StochAD alternatives
};

enum class Execution { Serial, Parallel };

struct GradientSample {
  double value = 0.0;
  Method method = Method::Score;
  double loss = 0.0;  // program output of the (unperturbed) primal run
  // StochAD: fraction of post-divergence draws fed by the FIFO (1 when no alternative ran).
  // Numeric: output of the perturbed run. Score methods: d log p / d theta of the run.
  double aux = 0.0;
  bool has_alternative = false;
};

/// Per-event streams for a batch: stream i = derive_stream({tag, i}).
std::vector<EventKey> event_keys(std::uint64_t seed, std::uint64_t tag, std::size_t n);

/**
 * One gradient sample per event key. ScoreBaseline subtracts the batch-mean
 * output; every other method treats events independently. Results are
 * ordered by key and identical under both execution policies.
 */
std::vector<GradientSample> estimate_batch(const Program& program, Method method, const Dual& theta,
                                           std::span<const EventKey> keys, const EstimatorOptions& opts = {},
                                           Execution exec = Execution::Parallel);

std::vector<GradientSample> numeric_gradient(const Program& program, double theta, std::span<const EventKey> keys,
                                             const EstimatorOptions& opts = {},
                                             Execution exec = Execution::Parallel);

std::vector<GradientSample> score_gradient(const Program& program, const Dual& theta,
                                           std::span<const EventKey> keys, bool use_baseline,
                                           Execution exec = Execution::Parallel);

std::vector<GradientSample> stochad_gradient(const Program& program, const Dual& theta,
                                             std::span<const EventKey> keys, bool coupling_enabled = true,
                                             Execution exec = Execution::Parallel);

/// Standard AD alone: the output tangent, blind to the discrete draws.
std::vector<double> smooth_only_gradient(const Program& program, const Dual& theta, std::span<const EventKey> keys);

std::vector<double> sample_values(std::span<const GradientSample> samples);

/// The simulator's design loss as a Program of the inner radius.
Program simulator_loss_program(const SimConfig& config, const DetectorParams& params);

}  // namespace stochgrad
