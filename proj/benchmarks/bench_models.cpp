#include <benchmark/benchmark.h>

#include "advstat/attacks.hpp"
#include "advstat/classifier.hpp"
#include "advstat/synth.hpp"

namespace {

using namespace advstat;

void TrainMlpEpoch(benchmark::State& state) {
  const Dataset digits = synth_digits(50, 3);
  TrainConfig config;
  config.epochs = 1;
  config.patience = 0;
  config.hidden_layers = {32};
  for (auto _ : state) {
    Classifier model = train(ModelFamily::mlp, digits, config);
    benchmark::DoNotOptimize(&model);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(digits.size()));
}
BENCHMARK(TrainMlpEpoch)->Unit(benchmark::kMillisecond);

void TrainCart(benchmark::State& state) {
  const Dataset digits = synth_digits(50, 3);
  TrainConfig config;
  config.max_depth = 8;
  for (auto _ : state) {
    Classifier model = train(ModelFamily::decision_tree, digits, config);
    benchmark::DoNotOptimize(&model);
  }
}
BENCHMARK(TrainCart)->Unit(benchmark::kMillisecond);

void CraftFgsm(benchmark::State& state) {
  const Dataset digits = synth_digits(20, 3);
  TrainConfig config;
  config.epochs = 10;
  config.hidden_layers = {32};
  const Classifier model = train(ModelFamily::mlp, digits, config);
  const AttackSpec spec = AttackSpec::fgsm_spec(0.275);
  for (auto _ : state) {
    BatchResult result = craft_batch(model, digits, spec);
    benchmark::DoNotOptimize(&result);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(digits.size()));
}
BENCHMARK(CraftFgsm)->Unit(benchmark::kMillisecond);

void CraftJsma(benchmark::State& state) {
  const Dataset digits = synth_digits(20, 3);
  TrainConfig config;
  config.epochs = 10;
  config.hidden_layers = {32};
  const Classifier model = train(ModelFamily::mlp, digits, config);
  const AttackSpec spec = AttackSpec::jsma_spec(12);
  for (auto _ : state) {
    BatchResult result = craft_batch(model, digits, spec);
    benchmark::DoNotOptimize(&result);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(digits.size()));
}
BENCHMARK(CraftJsma)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
