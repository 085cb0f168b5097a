#include "stochgrad/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <stdexcept>

#include <Eigen/Dense>

namespace stochgrad {

namespace {

enum : std::uint64_t {
  kScanLossTag = 0x5343414e4c4f5353ull,
  kScanGradTag = 0x5343414e47524144ull,
  kTableTag = 0x4752414454424c45ull,
  kOptTag = 0x4f5054494d495a45ull,
  kEvalTag = 0x4556414c4c4f5353ull,
};

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

std::uint64_t mode_tag(const ExperimentSetup& s) { return static_cast<std::uint64_t>(s.config.mode); }

}  // namespace

double PolyFit::value(double x) const {
  const double u = (x - center) / scale;
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double PolyFit::derivative(double x) const {
  const double u = (x - center) / scale;
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * u + static_cast<double>(k) * coeffs[k];
  return acc / scale;
}

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("fit_polynomial: need matching, nonempty inputs");
  const auto n = static_cast<Eigen::Index>(x.size());
  const int deg = std::max(0, std::min(degree, static_cast<int>(n) - 1));
  PolyFit fit;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  fit.center = 0.5 * (*lo + *hi);
  fit.scale = *hi > *lo ? 0.5 * (*hi - *lo) : 1.0;

  Eigen::MatrixXd vander(n, deg + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (x[i] - fit.center) / fit.scale;
    double p = 1.0;
    for (int k = 0; k <= deg; ++k) {
      vander(i, k) = p;
      p *= u;
    }
    rhs(i) = y[i];
  }
  const Eigen::VectorXd c = vander.colPivHouseholderQr().solve(rhs);
  fit.coeffs.assign(c.data(), c.data() + c.size());
  return fit;
}

std::vector<double> event_losses(const ExperimentSetup& setup, double theta, std::span<const EventKey> keys,
                                 Execution exec) {
  const Program program = simulator_loss_program(setup.config, setup.params);
  std::vector<double> out(keys.size());
  const Dual th = Dual::constant(theta);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      PrimalDraws draws(keys[i], false);
      out[i] = program(th, draws).value;
    }
    return out;
  }
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(keys.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      PrimalDraws draws(keys[i], false);
      out[i] = program(th, draws).value;
    } catch (...) {
#pragma omp critical(stochgrad_loss_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::uint64_t evaluation_tag() { return kEvalTag; }

double expected_loss(const ExperimentSetup& setup, double theta, std::size_t n, std::uint64_t tag, Execution exec) {
  const auto keys = event_keys(setup.seed, derive_stream({tag, static_cast<std::uint64_t>(setup.config.mode)}), n);
  return mean_of(event_losses(setup, theta, keys, exec));
}

ScanResult scan(const ExperimentSetup& setup, std::span<const double> theta_grid, std::size_t n_per_point,
                std::span<const Method> methods, int poly_degree, Execution exec) {
  if (theta_grid.empty()) throw std::invalid_argument("scan: empty grid");
  if (n_per_point < 2) throw std::invalid_argument("scan: need at least 2 events per point");
  const Program program = simulator_loss_program(setup.config, setup.params);

  ScanResult result;
  std::vector<double> mean_losses;
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    ScanPoint pt;
    pt.theta = theta_grid[i];
    const auto loss_keys =
        event_keys(setup.seed, derive_stream({kScanLossTag, mode_tag(setup), i, bits(pt.theta)}), n_per_point);
    pt.loss = estimator_stats(event_losses(setup, pt.theta, loss_keys, exec));
    for (Method m : methods) {
      const auto keys = event_keys(
          setup.seed, derive_stream({kScanGradTag, mode_tag(setup), i, bits(pt.theta), static_cast<std::uint64_t>(m)}),
          n_per_point);
      const auto samples = estimate_batch(program, m, Dual::variable(pt.theta), keys, setup.estimator, exec);
      pt.grads.push_back({m, estimator_stats(sample_values(samples))});
    }
    mean_losses.push_back(pt.loss.mean);
    result.points.push_back(std::move(pt));
  }
  result.fit = fit_polynomial(theta_grid, mean_losses, poly_degree);
  for (auto& pt : result.points) pt.poly_fit_grad = result.fit.derivative(pt.theta);
  return result;
}

std::vector<GradientSample> grad_samples(const ExperimentSetup& setup, double theta, std::size_t n, Method method,
                                         Execution exec) {
  const Program program = simulator_loss_program(setup.config, setup.params);
  const auto keys = event_keys(
      setup.seed, derive_stream({kTableTag, mode_tag(setup), bits(theta), static_cast<std::uint64_t>(method)}), n);
  return estimate_batch(program, method, Dual::variable(theta), keys, setup.estimator, exec);
}

std::vector<MethodStats> grad_table(const ExperimentSetup& setup, double theta, std::size_t n,
                                    std::span<const Method> methods, Execution exec) {
  if (n < 2) throw std::invalid_argument("grad_table: need n >= 2");
  std::vector<MethodStats> rows;
  for (Method m : methods) rows.push_back({m, estimator_stats(sample_values(grad_samples(setup, theta, n, m, exec)))});
  return rows;
}

namespace {

OptRun optimize_replica(const ExperimentSetup& setup, const Program& program, Method method,
                        const OptimizeOptions& opts, std::size_t replica) {
  OptRun run;
  run.method = method;
  run.replica_id = replica;
  run.seed = setup.seed + replica;
  run.theta_trace.reserve(opts.steps + 1);
  run.loss_trace.reserve(opts.steps + 1);

  AdamState state = opts.adam;
  double theta = opts.theta_init;
  for (std::size_t step = 0; step <= opts.steps; ++step) {
    const auto keys = event_keys(run.seed, derive_stream({kOptTag, mode_tag(setup), step}), opts.batch);
    run.theta_trace.push_back(theta);
    if (step == opts.steps) {
      std::vector<double> losses = event_losses(setup, theta, keys, Execution::Serial);
      run.loss_trace.push_back(mean_of(losses));
      break;
    }
    const auto samples =
        estimate_batch(program, method, Dual::variable(theta), keys, setup.estimator, Execution::Serial);
    double grad = 0.0;
    double batch_loss = 0.0;
    for (const auto& s : samples) {
      grad += s.value;
      batch_loss += s.loss;
    }
    grad /= static_cast<double>(samples.size());
    run.loss_trace.push_back(batch_loss / static_cast<double>(samples.size()));

    const AdamResult next = adam_step(state, grad, theta);
    state = next.state;
    theta = next.theta;
    if (theta < opts.theta_min || theta > opts.theta_max) {
      theta = std::clamp(theta, opts.theta_min, opts.theta_max);
      ++run.clamp_events;
    }
  }
  return run;
}

}  // namespace

std::vector<OptRun> optimize(const ExperimentSetup& setup, Method method, const OptimizeOptions& opts,
                             Execution exec) {
  if (opts.replicas < 1) throw std::invalid_argument("optimize: replicas must be >= 1");
  if (opts.steps < 1) throw std::invalid_argument("optimize: steps must be >= 1");
  if (opts.batch < 1) throw std::invalid_argument("optimize: batch must be >= 1");
  if (method == Method::ScoreBaseline && opts.batch < 2) {
    throw std::invalid_argument("optimize: the baseline needs batch >= 2");
  }
  const Program program = simulator_loss_program(setup.config, setup.params);
  std::vector<OptRun> runs(opts.replicas);
  const auto n = static_cast<std::ptrdiff_t>(opts.replicas);

  if (exec == Execution::Serial) {
    for (std::ptrdiff_t r = 0; r < n; ++r) runs[r] = optimize_replica(setup, program, method, opts, r);
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
      try {
        runs[r] = optimize_replica(setup, program, method, opts, r);
      } catch (...) {
#pragma omp critical(stochgrad_optimize_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  if (opts.eval_events > 0) {
    for (auto& run : runs) {
      run.final_expected_loss = expected_loss(setup, run.theta_trace.back(), opts.eval_events, kEvalTag, exec);
    }
  }
  return runs;
}

}  // namespace stochgrad
