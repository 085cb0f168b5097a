#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stochgrad/adam.hpp"
#include "stochgrad/estimators.hpp"
#include "stochgrad/simulator.hpp"
#include "stochgrad/stats.hpp"

namespace stochgrad {

/// Everything an experiment needs besides its own knobs.
struct ExperimentSetup {
  SimConfig config;
  DetectorParams params;
  EstimatorOptions estimator;
  std::uint64_t seed = 1;
};

struct MethodStats {
  Method method = Method::Score;
  EstimatorStats stats;
};

/// Least-squares polynomial in the standardized variable (x - center) / scale.
struct PolyFit {
  std::vector<double> coeffs;  // ascending powers
  double center = 0.0;
  double scale = 1.0;

  double value(double x) const;
  double derivative(double x) const;
};

/// Degree is reduced to points - 1 when there are too few points.
PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

struct ScanPoint {
  double theta = 0.0;
  EstimatorStats loss;
  double poly_fit_grad = 0.0;
  std::vector<MethodStats> grads;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  PolyFit fit;  // of the mean loss
};

/// Primal losses of a batch of events at theta.
std::vector<double> event_losses(const ExperimentSetup& setup, double theta, std::span<const EventKey> keys,
                                 Execution exec = Execution::Parallel);

/// Mean loss at theta over n events drawn from the stream family `tag`.
double expected_loss(const ExperimentSetup& setup, double theta, std::size_t n, std::uint64_t tag,
                     Execution exec = Execution::Parallel);

ScanResult scan(const ExperimentSetup& setup, std::span<const double> theta_grid, std::size_t n_per_point,
                std::span<const Method> methods, int poly_degree = 6, Execution exec = Execution::Parallel);

/// One row per method at a single theta.
std::vector<MethodStats> grad_table(const ExperimentSetup& setup, double theta, std::size_t n,
                                    std::span<const Method> methods, Execution exec = Execution::Parallel);

/// Raw gradient samples used by grad_table (same streams).
std::vector<GradientSample> grad_samples(const ExperimentSetup& setup, double theta, std::size_t n, Method method,
                                         Execution exec = Execution::Parallel);

struct OptimizeOptions {
  std::size_t replicas = 10;
  std::size_t steps = 500;
  std::size_t batch = 2;
  double theta_init = 3.0;
  AdamState adam;  // lr = 0.01, beta1 = 0.9, beta2 = 0.999, eps = 1e-8
  double theta_min = 0.5;
  double theta_max = 6.0;
  // Events used to evaluate the expected loss at the final theta (0 = skip).
  std::size_t eval_events = 0;
};

struct OptRun {
  Method method = Method::StochAD;
  std::size_t replica_id = 0;
  std::uint64_t seed = 0;
  std::vector<double> theta_trace;  // steps + 1 entries
  std::vector<double> loss_trace;   // batch-mean primal loss at each theta_trace entry
  std::size_t clamp_events = 0;
  double final_expected_loss = 0.0;
};

/**
 * Adam descent on the inner radius, one batch gradient per step. Replica r
 * uses seed + r; the batch at step s uses streams derived from (seed + r, s),
 * so every method sees the same primal events.
 */
std::vector<OptRun> optimize(const ExperimentSetup& setup, Method method, const OptimizeOptions& opts,
                             Execution exec = Execution::Parallel);

/// Stream family shared by all final-loss evaluations.
std::uint64_t evaluation_tag();

}  // namespace stochgrad
