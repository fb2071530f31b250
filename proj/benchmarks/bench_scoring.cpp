#include <benchmark/benchmark.h>

#include <vector>

#include "alkit/random.hpp"
#include "alkit/uncertainty.hpp"

namespace {

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t k) {
  alkit::Rng rng(1);
  std::vector<std::vector<double>> rows(n, std::vector<double>(k));
  for (auto& r : rows) {
    double s = 0.0;
    for (double& v : r) s += v = rng.uniform() + 1e-3;
    for (double& v : r) v /= s;
  }
  return rows;
}

void BM_Informativeness(benchmark::State& state) {
  const auto metric = static_cast<alkit::Metric>(state.range(0));
  const auto rows = random_rows(4096, 10);
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      acc += alkit::informativeness(metric, rows[i], {3, 1, i}).value;
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows.size()));
  state.SetLabel(std::string(alkit::metric_name(metric)));
}
BENCHMARK(BM_Informativeness)->DenseRange(0, 4);

void BM_SelectK(benchmark::State& state) {
  alkit::Rng rng(2);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  for (double& s : scores) s = rng.uniform();
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(alkit::select_k(scores, k));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectK)->Args({5000, 100})->Args({60000, 530})->Args({60000, 6000});

}  // namespace
