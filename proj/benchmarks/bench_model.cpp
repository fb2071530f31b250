#include <benchmark/benchmark.h>

#include "alkit/model.hpp"
#include "alkit/random.hpp"

namespace {

alkit::FeatureMatrix random_inputs(std::size_t rows, std::size_t cols) {
  alkit::Rng rng(5);
  alkit::FeatureMatrix x{rows, cols, std::vector<double>(rows * cols)};
  for (double& v : x.values) v = rng.uniform();
  return x;
}

// Forward pass over a 784-feature batch, the per-round pool scoring cost.
void BM_PredictBatch(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const alkit::Architecture arch = hidden == 0 ? alkit::Architecture::softmax() : alkit::Architecture::mlp(hidden);
  const alkit::ModelParams model = alkit::init_model(arch, 784, 10, 1);
  const alkit::FeatureMatrix x = random_inputs(256, 784);
  for (auto _ : state) benchmark::DoNotOptimize(alkit::predict_batch(model, x));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_PredictBatch)->Arg(0)->Arg(128);

void BM_FitRound(benchmark::State& state) {
  const alkit::FeatureMatrix x = random_inputs(512, 784);
  std::vector<alkit::Label> y(512);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<alkit::Label>(i % 10);
  alkit::TrainHyper hyper;
  hyper.minibatch_size = 32;
  for (auto _ : state) {
    alkit::ModelParams model = alkit::init_model(alkit::Architecture::mlp(128), 784, 10, 1);
    benchmark::DoNotOptimize(alkit::fit_round(model, x, y, hyper, 2));
  }
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_FitRound)->Unit(benchmark::kMillisecond);

}  // namespace
