#include <benchmark/benchmark.h>

#include "ecglong/assemble.hpp"
#include "ecglong/beat_synth.hpp"
#include "ecglong/delineate.hpp"
#include "ecglong/random.hpp"

using namespace ecglong;

namespace {

Signal beat_train(std::size_t beats, std::uint64_t seed) {
  BeatSynthConfig cfg;
  const auto base = analytic_template(cfg.window, cfg.fs, BeatLabel::Normal);
  RandomSource rng(seed);
  Signal s;
  s.fs = cfg.fs;
  std::int64_t at = cfg.window.pre_r + 8;
  std::vector<std::int64_t> rs;
  for (std::size_t i = 0; i < beats; ++i) {
    rs.push_back(at);
    at += 90 + static_cast<std::int64_t>(rng.uniform_int(40));
  }
  s.samples.assign(static_cast<std::size_t>(at + cfg.window.post_r + 1), 0.0);
  for (const std::int64_t r : rs)
    for (std::size_t t = 0; t < base.size(); ++t)
      s.samples[static_cast<std::size_t>(r - cfg.window.pre_r + static_cast<std::int64_t>(t))] += base[t];
  return s;
}

BeatStore population_store(std::size_t count) {
  BeatSynthConfig cfg;
  const auto base = analytic_template(cfg.window, cfg.fs, BeatLabel::Normal);
  std::vector<std::vector<double>> train(40, base);
  RandomSource jitter(3);
  for (auto& b : train)
    for (double& v : b) v *= 0.9 + 0.2 * jitter.uniform();
  const auto model = fit_template(train, BeatLabel::Normal, 3, cfg);
  RandomSource rng(4);
  return build_store(generate_beats(model, count, rng), default_schema(), cfg.window);
}

}  // namespace

static void BM_DetectRPeaks(benchmark::State& state) {
  const auto signal = beat_train(static_cast<std::size_t>(state.range(0)), 11);
  for (auto _ : state) benchmark::DoNotOptimize(detect_r_peaks(signal).size());
  state.SetItemsProcessed(state.iterations() * signal.length());
}
BENCHMARK(BM_DetectRPeaks)->Arg(100)->Arg(1000)->Arg(5000);

static void BM_GenerateBeats(benchmark::State& state) {
  BeatSynthConfig cfg;
  const auto base = analytic_template(cfg.window, cfg.fs, BeatLabel::Normal);
  std::vector<std::vector<double>> train(40, base);
  RandomSource jitter(5);
  for (auto& b : train)
    for (double& v : b) v *= 0.9 + 0.2 * jitter.uniform();
  const auto model = fit_template(train, BeatLabel::Normal, 3, cfg);
  RandomSource rng(6);
  for (auto _ : state) {
    auto beats = generate_beats(model, static_cast<std::size_t>(state.range(0)), rng);
    benchmark::DoNotOptimize(beats.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateBeats)->Arg(100)->Arg(1000);

static void BM_Assemble(benchmark::State& state) {
  const auto store = population_store(10000);
  FeatureTrajectory traj;
  traj.schema = store.schema();
  RandomSource rng(7);
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const auto& pool = store.partition(BeatLabel::Normal);
    FeatureVector row;
    const double* g = store.descriptor_row(pool[rng.uniform_int(pool.size())]);
    row.values.assign(g, g + store.schema().size());
    row.values[0] = 700.0 + 200.0 * rng.uniform();
    traj.rows.push_back(std::move(row));
  }
  for (auto _ : state) {
    auto out = assemble(traj, store, {}, CandidateMode::sampled(16, 64, 8), {}, 128);
    benchmark::DoNotOptimize(out.signal.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Assemble)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
