#include "ecglong/beat_store.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "ecglong/errors.hpp"
#include "ecglong/random.hpp"

namespace ecglong {

const BeatRecord& BeatStore::by_id(std::int64_t id) const {
  auto it = std::lower_bound(beats_.begin(), beats_.end(), id,
                             [](const BeatRecord& b, std::int64_t v) { return b.id < v; });
  if (it == beats_.end() || it->id != id) fail(Errc::out_of_bounds, "BeatStore: no beat with id " + std::to_string(id));
  return *it;
}

BeatStore build_store(std::vector<BeatRecord> beats, std::vector<std::string> schema,
                      const BeatWindow& window) {
  if (beats.empty()) fail(Errc::empty_input, "build_store: no beats");
  if (schema.empty()) fail(Errc::empty_input, "build_store: empty schema");

  std::sort(beats.begin(), beats.end(), [](const BeatRecord& a, const BeatRecord& b) { return a.id < b.id; });
  std::unordered_set<std::int64_t> seen;
  for (const auto& b : beats) {
    if (!seen.insert(b.id).second) fail(Errc::duplicate_id, "build_store: duplicate beat id " + std::to_string(b.id));
    if (b.waveform.size() != static_cast<std::size_t>(window.length()))
      fail(Errc::length_mismatch,
           "build_store: beat " + std::to_string(b.id) + " waveform does not match the window length");
    for (const auto& name : schema)
      if (!b.descriptors.count(name))
        fail(Errc::missing_descriptor,
             "build_store: beat " + std::to_string(b.id) + " lacks descriptor '" + name + "'");
  }

  BeatStore store;
  store.schema_ = std::move(schema);
  store.window_ = window;
  store.beats_ = std::move(beats);
  const std::size_t d = store.schema_.size();
  store.matrix_.resize(store.beats_.size() * d);
  for (std::size_t i = 0; i < store.beats_.size(); ++i) {
    const auto& rec = store.beats_[i];
    (rec.label == BeatLabel::Normal ? store.normal_ : store.abnormal_).push_back(i);
    for (std::size_t k = 0; k < d; ++k) store.matrix_[i * d + k] = rec.descriptors.at(store.schema_[k]);
  }

  store.stats_.mean.assign(d, 0.0);
  store.stats_.stddev.assign(d, 0.0);
  const double n = static_cast<double>(store.beats_.size());
  for (std::size_t i = 0; i < store.beats_.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) store.stats_.mean[k] += store.matrix_[i * d + k];
  for (double& m : store.stats_.mean) m /= n;
  for (std::size_t i = 0; i < store.beats_.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = store.matrix_[i * d + k] - store.stats_.mean[k];
      store.stats_.stddev[k] += dev * dev;
    }
  for (double& s : store.stats_.stddev) s = std::sqrt(s / n);
  return store;
}

std::vector<std::size_t> candidates(const BeatStore& store, BeatLabel label, const CandidateMode& mode) {
  const auto& pool = store.partition(label);
  if (pool.empty()) fail(Errc::label_empty, std::string("candidates: no beats labelled ") + to_string(label));
  if (mode.kind == CandidateMode::Kind::Exhaustive) return pool;

  if (mode.batch <= 0 || mode.max <= 0) fail(Errc::invalid_config, "candidates: batch and max must be positive");
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(mode.max), pool.size());
  // Partial Fisher-Yates: draws arrive in batches of `batch`, without
  // replacement, deterministic in the seed.
  std::vector<std::size_t> order(pool);
  RandomSource rng(mode.seed);
  std::vector<std::size_t> out;
  out.reserve(want);
  while (out.size() < want) {
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(mode.batch), want - out.size());
    for (std::size_t b = 0; b < take; ++b) {
      const std::size_t i = out.size();
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(order.size() - i));
      std::swap(order[i], order[j]);
      out.push_back(order[i]);
    }
  }
  return out;
}

}  // namespace ecglong
