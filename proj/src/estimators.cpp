#include "stochgrad/estimators.hpp"

#include <exception>
#include <stdexcept>

namespace stochgrad {

namespace {

// Perturbed finite-difference runs use a disjoint family of streams.
constexpr std::uint64_t kPerturbedTag = 0x7065727475726264ull;

EventKey perturbed_key(const EventKey& key) { return {key.seed, derive_stream({key.stream_id, kPerturbedTag})}; }

GradientSample numeric_event(const Program& program, double theta, const EventKey& key,
                             const EstimatorOptions& opts) {
  const EventKey other = opts.fd_common_seed ? key : perturbed_key(key);
  GradientSample s;
  s.method = Method::Numeric;
  PrimalDraws up(other, false);
  const double f_up = program(Dual::constant(theta + opts.fd_eps), up).value;
  if (opts.fd_central) {
    PrimalDraws down(key, false);
    const double f_down = program(Dual::constant(theta - opts.fd_eps), down).value;
    s.value = (f_up - f_down) / (2.0 * opts.fd_eps);
    s.loss = f_down;
  } else {
    PrimalDraws base(key, false);
    const double f0 = program(Dual::constant(theta), base).value;
    s.value = (f_up - f0) / opts.fd_eps;
    s.loss = f0;
  }
  s.aux = f_up;
  return s;
}

// Score samples hold the smooth part in `value` and the score in `aux`
// until the baseline is known.
GradientSample score_event(const Program& program, const Dual& theta, const EventKey& key, Method method) {
  PrimalDraws draws(key, false);
  const Dual f = program(theta, draws);
  GradientSample s;
  s.method = method;
  s.loss = f.value;
  s.aux = draws.score_tangent();
  s.value = f.tangent;
  return s;
}

GradientSample stochad_event(const Program& program, const Dual& theta, const EventKey& key,
                             const EstimatorOptions& opts) {
  PrimalDraws primal(key, true);
  const Dual f = program(theta, primal);
  GradientSample s;
  s.method = Method::StochAD;
  s.loss = f.value;
  s.value = f.tangent;
  s.aux = 1.0;
  const auto weight = pruned_weight(primal.pruning());
  if (!weight) return s;
  const DiscreteAlternative& chosen = *primal.pruning().chosen;
  AlternativeDraws alt(key, primal.trace(), {chosen.draw_id, chosen.flipped_value}, opts.coupling);
  const Dual f_alt = program(theta, alt);
  s.value += *weight * (f_alt.value - f.value);
  s.has_alternative = true;
  const auto post = alt.coupled_draws() + alt.fresh_draws();
  s.aux = post > 0 ? static_cast<double>(alt.coupled_draws()) / static_cast<double>(post) : 1.0;
  return s;
}

GradientSample sample_event(const Program& program, Method method, const Dual& theta, const EventKey& key,
                            const EstimatorOptions& opts) {
  switch (method) {
    case Method::Numeric: return numeric_event(program, theta.value, key, opts);
    case Method::Score:
    case Method::ScoreBaseline: return score_event(program, theta, key, method);
    case Method::StochAD: return stochad_event(program, theta, key, opts);
  }
  throw std::logic_error("unknown method");
}

void run_serial(const Program& program, Method method, const Dual& theta, std::span<const EventKey> keys,
                const EstimatorOptions& opts, std::vector<GradientSample>& out) {
  for (std::size_t i = 0; i < keys.size(); ++i) out[i] = sample_event(program, method, theta, keys[i], opts);
}

void run_parallel(const Program& program, Method method, const Dual& theta, std::span<const EventKey> keys,
                  const EstimatorOptions& opts, std::vector<GradientSample>& out) {
  const auto n = static_cast<std::ptrdiff_t>(keys.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = sample_event(program, method, theta, keys[i], opts);
    } catch (...) {
#pragma omp critical(stochgrad_estimator_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Numeric: return "numeric";
    case Method::Score: return "score";
    case Method::ScoreBaseline: return "score_baseline";
    case Method::StochAD: return "stochad";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "numeric") return Method::Numeric;
  if (s == "score") return Method::Score;
  if (s == "score_baseline" || s == "score-baseline") return Method::ScoreBaseline;
  if (s == "stochad") return Method::StochAD;
  throw std::invalid_argument("unknown method '" + s + "'");
}

std::vector<EventKey> event_keys(std::uint64_t seed, std::uint64_t tag, std::size_t n) {
  std::vector<EventKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = {seed, derive_stream({tag, i})};
  return keys;
}

std::vector<GradientSample> estimate_batch(const Program& program, Method method, const Dual& theta,
                                           std::span<const EventKey> keys, const EstimatorOptions& opts,
                                           Execution exec) {
  if (method == Method::Numeric && !(opts.fd_eps > 0.0)) throw std::invalid_argument("fd_eps must be > 0");
  if (method == Method::ScoreBaseline && keys.size() < 2) {
    throw std::invalid_argument("score baseline needs a batch of at least 2");
  }
  std::vector<GradientSample> out(keys.size());
  if (exec == Execution::Serial) {
    run_serial(program, method, theta, keys, opts, out);
  } else {
    run_parallel(program, method, theta, keys, opts, out);
  }

  if (method == Method::Score || method == Method::ScoreBaseline) {
    double baseline = 0.0;
    if (method == Method::ScoreBaseline) {
      for (const auto& s : out) baseline += s.loss;
      baseline /= static_cast<double>(out.size());
    }
    for (auto& s : out) s.value += s.aux * (s.loss - baseline);
  }
  return out;
}

std::vector<GradientSample> numeric_gradient(const Program& program, double theta, std::span<const EventKey> keys,
                                             const EstimatorOptions& opts, Execution exec) {
  return estimate_batch(program, Method::Numeric, Dual::constant(theta), keys, opts, exec);
}

std::vector<GradientSample> score_gradient(const Program& program, const Dual& theta,
                                           std::span<const EventKey> keys, bool use_baseline, Execution exec) {
  return estimate_batch(program, use_baseline ? Method::ScoreBaseline : Method::Score, theta, keys, {}, exec);
}

std::vector<GradientSample> stochad_gradient(const Program& program, const Dual& theta,
                                             std::span<const EventKey> keys, bool coupling_enabled,
                                             Execution exec) {
  EstimatorOptions opts;
  opts.coupling = coupling_enabled;
  return estimate_batch(program, Method::StochAD, theta, keys, opts, exec);
}

std::vector<double> smooth_only_gradient(const Program& program, const Dual& theta, std::span<const EventKey> keys) {
  std::vector<double> out;
  out.reserve(keys.size());
  for (const auto& key : keys) {
    PrimalDraws draws(key, false);
    out.push_back(program(theta, draws).tangent);
  }
  return out;
}

std::vector<double> sample_values(std::span<const GradientSample> samples) {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.value);
  return v;
}

Program simulator_loss_program(const SimConfig& config, const DetectorParams& params) {
  config.validate();
  params.validate();
  return [config, params](const Dual& theta, DrawSource& draws) {
    const Event ev = simulate_event(config, params.with_theta(theta), draws);
    // Hit positions do not depend smoothly on the inner radius: zero tangent.
    return Dual::constant(loss(ev, config));
  };
}

}  // namespace stochgrad
