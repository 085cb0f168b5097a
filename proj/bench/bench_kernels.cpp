// Serial reference vs OpenMP kernels on the same event batches.
#include <benchmark/benchmark.h>

#include "stochgrad/estimators.hpp"
#include "stochgrad/experiments.hpp"

using namespace stochgrad;

namespace {

ExperimentSetup shower() {
  ExperimentSetup s;
  s.config.mode = SimMode::Shower;
  return s;
}

void estimate(benchmark::State& state, Method method, Execution exec) {
  const auto s = shower();
  const Program prog = simulator_loss_program(s.config, s.params);
  const auto keys = event_keys(1, 1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = estimate_batch(prog, method, Dual::variable(2.5), keys, s.estimator, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void losses(benchmark::State& state, Execution exec) {
  const auto s = shower();
  const auto keys = event_keys(1, 2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = event_losses(s, 2.5, keys, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(estimate, stochad_serial, Method::StochAD, Execution::Serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(estimate, stochad_parallel, Method::StochAD, Execution::Parallel)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(estimate, score_serial, Method::Score, Execution::Serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(estimate, score_parallel, Method::Score, Execution::Parallel)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(losses, serial, Execution::Serial)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(losses, parallel, Execution::Parallel)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
