#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "ecglong/beat_store.hpp"
#include "ecglong/beat_synth.hpp"
#include "ecglong/errors.hpp"
#include "helpers.hpp"

using namespace ecglong;

namespace {

BeatRecord make_record(std::int64_t id, BeatLabel label, double a, double b, int width = 3) {
  BeatRecord r;
  r.id = id;
  r.label = label;
  r.waveform.assign(static_cast<std::size_t>(width), 0.0);
  r.waveform[static_cast<std::size_t>(width / 2)] = 1.0;
  r.descriptors = {{"A", a}, {"B", b}};
  return r;
}

const BeatWindow kTinyWindow{1, 1};

}  // namespace

TEST_CASE("store stats match hand arithmetic") {
  const auto store = build_store({make_record(0, BeatLabel::Normal, 1.0, 10.0),
                                  make_record(1, BeatLabel::Normal, 3.0, 30.0)},
                                 {"A", "B"}, kTinyWindow);
  CHECK(store.descriptor_stats().mean == std::vector<double>{2.0, 20.0});
  CHECK(store.descriptor_stats().stddev == std::vector<double>{1.0, 10.0});  // population
}

TEST_CASE("store construction failure modes") {
  try {
    build_store({}, {"A"}, kTinyWindow);
    FAIL("expected empty_input");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_input);
  }
  try {
    build_store({make_record(0, BeatLabel::Normal, 1, 2), make_record(0, BeatLabel::Normal, 1, 2)}, {"A", "B"},
                kTinyWindow);
    FAIL("expected duplicate_id");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_id);
  }
  try {
    build_store({make_record(0, BeatLabel::Normal, 1, 2)}, {"A", "B", "C"}, kTinyWindow);
    FAIL("expected missing_descriptor");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_descriptor);
  }
  try {
    build_store({make_record(0, BeatLabel::Normal, 1, 2, 5)}, {"A", "B"}, kTinyWindow);
    FAIL("expected length_mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::length_mismatch);
  }
}

TEST_CASE("exhaustive candidates yield exactly the label partition") {
  const auto store = build_store({make_record(5, BeatLabel::Normal, 1, 1), make_record(2, BeatLabel::Normal, 2, 2),
                                  make_record(9, BeatLabel::Normal, 3, 3), make_record(7, BeatLabel::Abnormal, 4, 4)},
                                 {"A", "B"}, kTinyWindow);
  const auto normal = candidates(store, BeatLabel::Normal, CandidateMode::exhaustive());
  REQUIRE(normal.size() == 3);
  std::set<std::int64_t> ids;
  for (const std::size_t idx : normal) ids.insert(store.beats()[idx].id);
  CHECK(ids == std::set<std::int64_t>{2, 5, 9});
}

TEST_CASE("sampled candidates: distinct, reproducible, capped") {
  std::vector<BeatRecord> beats;
  for (int i = 0; i < 500; ++i) beats.push_back(make_record(i, BeatLabel::Normal, i, -i));
  const auto store = build_store(std::move(beats), {"A", "B"}, kTinyWindow);

  const auto s1 = candidates(store, BeatLabel::Normal, CandidateMode::sampled(10, 10, 77));
  const auto s2 = candidates(store, BeatLabel::Normal, CandidateMode::sampled(10, 10, 77));
  CHECK(s1 == s2);
  CHECK(s1.size() == 10);
  CHECK(std::set<std::size_t>(s1.begin(), s1.end()).size() == 10);

  const auto s3 = candidates(store, BeatLabel::Normal, CandidateMode::sampled(10, 10, 78));
  CHECK(s1 != s3);
}

TEST_CASE("sampling with max >= pool size is a permutation of the partition") {
  std::vector<BeatRecord> beats;
  for (int i = 0; i < 40; ++i) beats.push_back(make_record(i, i % 3 == 0 ? BeatLabel::Abnormal : BeatLabel::Normal, i, i));
  const auto store = build_store(std::move(beats), {"A", "B"}, kTinyWindow);
  const auto& pool = store.partition(BeatLabel::Normal);
  const auto sampled = candidates(store, BeatLabel::Normal, CandidateMode::sampled(7, 1000, 79));
  CHECK(sampled.size() == pool.size());
  CHECK(std::set<std::size_t>(sampled.begin(), sampled.end()) ==
        std::set<std::size_t>(pool.begin(), pool.end()));
}

TEST_CASE("label partitions are disjoint and cover the store") {
  std::vector<BeatRecord> beats;
  for (int i = 0; i < 100; ++i) beats.push_back(make_record(i, i % 4 == 0 ? BeatLabel::Abnormal : BeatLabel::Normal, i, i));
  const auto store = build_store(std::move(beats), {"A", "B"}, kTinyWindow);
  std::set<std::size_t> normal(store.partition(BeatLabel::Normal).begin(), store.partition(BeatLabel::Normal).end());
  std::set<std::size_t> abnormal(store.partition(BeatLabel::Abnormal).begin(), store.partition(BeatLabel::Abnormal).end());
  CHECK(normal.size() + abnormal.size() == store.size());
  for (const std::size_t idx : abnormal) CHECK(normal.count(idx) == 0);
}

TEST_CASE("missing label partition raises label_empty") {
  const auto store = build_store({make_record(0, BeatLabel::Normal, 1, 2)}, {"A", "B"}, kTinyWindow);
  try {
    candidates(store, BeatLabel::Abnormal, CandidateMode::exhaustive());
    FAIL("expected label_empty");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::label_empty);
  }
}

TEST_CASE("stats recompute exactly from the store's own records") {
  const auto cfg = [] {
    BeatSynthConfig c;
    c.window = BeatWindow{60, 120};
    return c;
  }();
  const auto train = testutil::jittered_population(analytic_template(cfg.window, cfg.fs, BeatLabel::Normal), 40, 0.2, 91);
  const auto model = fit_template(train, BeatLabel::Normal, 3, cfg);
  RandomSource rng(92);
  auto generated = generate_beats(model, 300, rng);
  const auto store = build_store(generated, default_schema(), cfg.window);
  const auto rebuilt = build_store(store.beats(), store.schema(), store.window());
  CHECK(rebuilt.descriptor_stats().mean == store.descriptor_stats().mean);
  CHECK(rebuilt.descriptor_stats().stddev == store.descriptor_stats().stddev);
}

TEST_CASE("a large generated population builds cleanly") {
  BeatSynthConfig cfg;
  cfg.window = BeatWindow{60, 120};
  const auto train = testutil::jittered_population(analytic_template(cfg.window, cfg.fs, BeatLabel::Normal), 50, 0.2, 93);
  const auto model = fit_template(train, BeatLabel::Normal, 4, cfg);
  RandomSource rng(94);
  const auto generated = generate_beats(model, 10000, rng);
  const auto store = build_store(generated, default_schema(), cfg.window);
  CHECK(store.size() == 10000);
  // Stats consistent with the dense matrix within 1e-9.
  const std::size_t d = store.schema().size();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < store.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) mean[k] += store.descriptor_row(i)[k];
  for (std::size_t k = 0; k < d; ++k) CHECK(std::abs(mean[k] / 10000.0 - store.descriptor_stats().mean[k]) < 1e-9);
}
