// Serial reference against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "jensen/discrete_functionals.hpp"
#include "jensen/integral_functionals.hpp"

using namespace jensen;

namespace {

GroupedInstance make_instance(std::size_t k, std::size_t n) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<WeightedGroup> groups;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> x(n);
    for (double& v : x) v = u(rng);
    groups.push_back(WeightedGroup{WeightVector::uniform(n), std::move(x)});
  }
  return GroupedInstance(std::move(groups), WeightVector::uniform(k));
}

void BM_jensen_k(benchmark::State& state, Execution exec) {
  const auto inst = make_instance(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const FunctionSpec f = power_function(3);
  const EnumerationOptions opts{10'000'000, exec};
  for (auto _ : state) benchmark::DoNotOptimize(jensen_k(f, inst, opts).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * inst.term_count()));
}

void BM_tensor(benchmark::State& state, Execution exec) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  const std::vector<DensitySpec> d(k, linear_density(1.0, 3.0));
  QuadratureSpec quad;
  quad.nodes_per_axis = static_cast<std::size_t>(state.range(1));
  quad.execution = exec;
  const FunctionSpec f = xsqlog_function();
  for (auto _ : state) benchmark::DoNotOptimize(jensen_k_int(f, d, WeightVector::uniform(k), quad).value);
}

void BM_monte_carlo(benchmark::State& state, Execution exec) {
  const std::vector<DensitySpec> d(3, powerlaw_density(1.0, 3.0, 2.0));
  QuadratureSpec quad;
  quad.mode = QuadratureSpec::Mode::monte_carlo;
  quad.sample_count = static_cast<std::uint64_t>(state.range(0));
  quad.execution = exec;
  const FunctionSpec f = power_function(2.5);
  for (auto _ : state) benchmark::DoNotOptimize(jensen_k_int(f, d, WeightVector::uniform(3), quad).value);
}

}  // namespace

BENCHMARK_CAPTURE(BM_jensen_k, serial, Execution::serial)->Args({3, 50})->Args({4, 30});
BENCHMARK_CAPTURE(BM_jensen_k, parallel, Execution::parallel)->Args({3, 50})->Args({4, 30});
BENCHMARK_CAPTURE(BM_tensor, serial, Execution::serial)->Args({3, 32})->Args({4, 24});
BENCHMARK_CAPTURE(BM_tensor, parallel, Execution::parallel)->Args({3, 32})->Args({4, 24});
BENCHMARK_CAPTURE(BM_monte_carlo, serial, Execution::serial)->Arg(200'000);
BENCHMARK_CAPTURE(BM_monte_carlo, parallel, Execution::parallel)->Arg(200'000);

BENCHMARK_MAIN();
