#include <benchmark/benchmark.h>

#include "advstat/kernel.hpp"
#include "advstat/random.hpp"
#include "advstat/stats.hpp"

namespace {

using namespace advstat;

Matrix gaussian_sample(std::size_t n, std::size_t d, double mean, std::uint64_t seed) {
  RandomSource rng(seed);
  Matrix m(n, d);
  for (double& v : m.values()) v = mean + rng.next_gaussian();
  return m;
}

void KernelMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = gaussian_sample(n, 64, 0.0, 1);
  const Matrix b = gaussian_sample(n, 64, 0.5, 2);
  const KernelSpec spec = KernelSpec::gaussian(1.0);
  for (auto _ : state) {
    Matrix k = kernel_matrix(a, b, spec);
    benchmark::DoNotOptimize(k.values().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(KernelMatrix)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void MmdBiased(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = gaussian_sample(n, 64, 0.0, 1);
  const Matrix b = gaussian_sample(n, 64, 0.5, 2);
  const KernelSpec spec = KernelSpec::gaussian(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mmd_biased(a, b, spec));
  }
}
BENCHMARK(MmdBiased)->Arg(50)->Arg(100)->Arg(200);

void TwoSampleTest(benchmark::State& state) {
  const auto b_iters = static_cast<int>(state.range(0));
  const Matrix x1 = gaussian_sample(50, 64, 0.0, 1);
  const Matrix x2 = gaussian_sample(50, 64, 0.5, 2);
  TestParams params;
  params.bootstrap_iterations = b_iters;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(two_sample_test(x1, x2, params, seed++).p_value);
  }
}
BENCHMARK(TwoSampleTest)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void MedianHeuristic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = gaussian_sample(n, 64, 0.0, 1);
  const Matrix b = gaussian_sample(n, 64, 0.5, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(median_pairwise_distance(a, b));
  }
}
BENCHMARK(MedianHeuristic)->Arg(100)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
