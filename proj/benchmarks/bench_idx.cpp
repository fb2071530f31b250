#include <benchmark/benchmark.h>

#include "alkit/idx.hpp"

namespace {

void BM_ParseImages(benchmark::State& state) {
  alkit::idx::Images images;
  const auto n = static_cast<std::uint32_t>(state.range(0));
  images.count = n;
  images.rows = 28;
  images.cols = 28;
  images.pixels.assign(std::size_t{n} * 784, 7);
  const std::vector<std::uint8_t> bytes = alkit::idx::serialize(images);
  for (auto _ : state) benchmark::DoNotOptimize(alkit::idx::parse_images(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ParseImages)->Arg(10000)->Arg(60000)->Unit(benchmark::kMillisecond);

}  // namespace
