#include <benchmark/benchmark.h>

#include "ecglong/metrics.hpp"
#include "ecglong/random.hpp"

using namespace ecglong;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

static void BM_Dtw(benchmark::State& state) {
  const auto a = noise(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(dtw_distance(a, b));
}
BENCHMARK(BM_Dtw)->Arg(128)->Arg(181)->Arg(512);

static void BM_Frechet(benchmark::State& state) {
  const auto a = noise(static_cast<std::size_t>(state.range(0)), 3);
  const auto b = noise(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(frechet_distance(a, b));
}
BENCHMARK(BM_Frechet)->Arg(128)->Arg(181)->Arg(512);

static void BM_Divergences(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 5);
  const auto y = noise(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) {
    auto d = divergences(x, y);
    benchmark::DoNotOptimize(d.mmd);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Divergences)->Arg(256)->Arg(1024)->Arg(10000);

static void BM_Wasserstein(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 7);
  const auto y = noise(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein1(x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Wasserstein)->Arg(1000)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
