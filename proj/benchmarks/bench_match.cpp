#include <benchmark/benchmark.h>

#include "ecglong/assemble.hpp"
#include "ecglong/beat_store.hpp"
#include "ecglong/random.hpp"

using namespace ecglong;

namespace {

BeatStore make_store(std::size_t n, std::size_t d) {
  RandomSource rng(1);
  std::vector<std::string> schema;
  for (std::size_t k = 0; k < d; ++k) schema.push_back("f" + std::to_string(k));
  std::vector<BeatRecord> beats(n);
  for (std::size_t i = 0; i < n; ++i) {
    beats[i].id = static_cast<std::int64_t>(i);
    beats[i].waveform = {0.0, 1.0, 0.0};
    for (std::size_t k = 0; k < d; ++k) beats[i].descriptors[schema[k]] = rng.normal();
  }
  return build_store(std::move(beats), schema, BeatWindow{1, 1});
}

FeatureVector make_target(std::size_t d) {
  RandomSource rng(2);
  FeatureVector f;
  for (std::size_t k = 0; k < d; ++k) f.values.push_back(rng.normal());
  return f;
}

}  // namespace

static void BM_MatchExhaustive(benchmark::State& state) {
  const auto store = make_store(static_cast<std::size_t>(state.range(0)), 8);
  const auto target = make_target(8);
  for (auto _ : state) {
    auto rec = match_beat(target, store.schema(), store, {}, CandidateMode::exhaustive());
    benchmark::DoNotOptimize(rec.beat_id);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchExhaustive)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_MatchSampled(benchmark::State& state) {
  const auto store = make_store(10000, 8);
  const auto target = make_target(8);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto rec = match_beat(target, store.schema(), store, {},
                          CandidateMode::sampled(16, static_cast<int>(state.range(0)), ++seed));
    benchmark::DoNotOptimize(rec.beat_id);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchSampled)->Arg(64)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
