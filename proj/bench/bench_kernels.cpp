// Serial vs parallel filter steps and resampling throughput.

#include <benchmark/benchmark.h>

#include <vector>

#include "smc/filter.hpp"
#include "smc/fixtures.hpp"
#include "smc/resample.hpp"

namespace {

using namespace smc;

Execution execution_of(const benchmark::State& state) {
  return state.range(1) ? Execution::parallel : Execution::serial;
}

template <Sampler S>
void BM_FilterStep(benchmark::State& state) {
  const auto model = fixtures::stochastic_volatility();
  FilterConfig cfg;
  cfg.sampler = S;
  cfg.particles = static_cast<std::size_t>(state.range(0));
  cfg.execution = execution_of(state);
  const auto prev = initial_particles(model, cfg);
  const double y = 0.3;
  const RandomStream root(11);
  std::uint64_t k = 0;
  for (auto _ : state) {
    const RandomStream stream = root.split(k++);
    if constexpr (S == Sampler::sir) {
      benchmark::DoNotOptimize(sir_step(prev, model, 1, y, cfg, stream));
    } else {
      benchmark::DoNotOptimize(ar_step(prev, model, 1, y, cfg, stream));
    }
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Resample(benchmark::State& state) {
  const auto scheme = static_cast<Scheme>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  RandomStream rng(12);
  std::vector<double> w(n);
  for (double& v : w) v = rng.uniform_open();
  const auto pi = InclusionProbabilities::from_weights(w);
  for (auto _ : state) benchmark::DoNotOptimize(resample(scheme, pi, n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(std::string(to_string(scheme)));
}

}  // namespace

BENCHMARK(BM_FilterStep<Sampler::sir>)->ArgsProduct({{1000, 100000}, {0, 1}});
BENCHMARK(BM_FilterStep<Sampler::accept_reject>)->ArgsProduct({{1000, 100000}, {0, 1}});
BENCHMARK(BM_FilterStep<Sampler::aux_accept_reject>)->ArgsProduct({{1000, 100000}, {0, 1}});
BENCHMARK(BM_Resample)->ArgsProduct({{0, 1, 2, 3}, {1000, 100000}});

BENCHMARK_MAIN();
