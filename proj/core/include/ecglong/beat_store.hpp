#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecglong/signal.hpp"

namespace ecglong {

struct DescriptorStats {
  std::vector<double> mean;    // aligned to schema
  std::vector<double> stddev;  // population convention
};

/// Immutable candidate pool for the matcher: beat records partitioned by
/// label, descriptors packed into a dense schema-aligned matrix, store-wide
/// descriptor statistics for standardized costing.
class BeatStore {
 public:
  const std::vector<std::string>& schema() const { return schema_; }
  const BeatWindow& window() const { return window_; }
  const std::vector<BeatRecord>& beats() const { return beats_; }
  const std::vector<std::size_t>& partition(BeatLabel label) const {
    return label == BeatLabel::Normal ? normal_ : abnormal_;
  }
  bool has_label(BeatLabel label) const { return !partition(label).empty(); }
  const DescriptorStats& descriptor_stats() const { return stats_; }
  std::size_t size() const { return beats_.size(); }

  const BeatRecord& by_id(std::int64_t id) const;

  // Dense descriptor row of beat `index` (schema order).
  const double* descriptor_row(std::size_t index) const { return matrix_.data() + index * schema_.size(); }

  friend BeatStore build_store(std::vector<BeatRecord> beats, std::vector<std::string> schema,
                               const BeatWindow& window);

 private:
  std::vector<std::string> schema_;
  BeatWindow window_{};
  std::vector<BeatRecord> beats_;          // ascending id
  std::vector<std::size_t> normal_, abnormal_;  // indices into beats_
  std::vector<double> matrix_;             // size() x dim(), row-major
  DescriptorStats stats_;
};

// Validates ids, waveform lengths, and descriptor completeness, sorts by id,
// precomputes the dense descriptor matrix and the store-wide stats.
BeatStore build_store(std::vector<BeatRecord> beats, std::vector<std::string> schema,
                      const BeatWindow& window);

/// Candidate selection: the whole label partition, or a seeded uniform
/// sample without replacement drawn in batches up to a cap.
struct CandidateMode {
  enum class Kind { Exhaustive, Sampled };
  Kind kind = Kind::Sampled;
  int batch = 16;
  int max = 64;
  std::uint64_t seed = 0;

  static CandidateMode exhaustive() { return {Kind::Exhaustive, 0, 0, 0}; }
  static CandidateMode sampled(int batch, int max, std::uint64_t seed) {
    return {Kind::Sampled, batch, max, seed};
  }
};

// Store indices of the candidates for one label, in evaluation order.
// Exhaustive yields the full partition (ascending id); Sampled yields
// min(max, partition size) distinct draws, deterministic in the seed.
std::vector<std::size_t> candidates(const BeatStore& store, BeatLabel label, const CandidateMode& mode);

}  // namespace ecglong
