#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecglong/beat_store.hpp"
#include "ecglong/delineate.hpp"
#include "ecglong/signal.hpp"

namespace ecglong {

/// Weighted squared-distance objective. With standardize on (the default),
/// features are z-scored by the store's descriptor statistics before
/// costing, so mV and ms scales contribute comparably. An empty weight
/// vector means unit weights.
struct MatchWeights {
  std::vector<double> weights;
  bool standardize = true;
};

/// Instrumentation for one matched position (the published matching-workflow
/// table rows). Absolute differences are stored in raw feature units.
struct MatchRecord {
  std::size_t position = 0;
  FeatureVector target;
  std::int64_t beat_id = 0;
  std::vector<double> chosen_descriptors;  // schema order
  double cost = 0.0;
  std::vector<double> abs_diff;            // schema order, raw units
  std::size_t candidates_evaluated = 0;
};

struct AssembledSignal {
  Signal signal;
  std::vector<std::int64_t> r_indices;
  std::vector<MatchRecord> matches;
};

struct SmoothingConfig {
  int max_crossfade = 8;  // samples
};

// Minimize sum_k w_k (f_k - g_k(b))^2 over the candidate set of the target's
// label; ties break to the lowest beat id.
MatchRecord match_beat(const FeatureVector& target, const std::vector<std::string>& schema,
                       const BeatStore& store, const MatchWeights& weights, const CandidateMode& mode);

// Match a beat per trajectory row and stitch them: each beat's R sample is
// placed at the cumulative target R-R offsets (per-interval nearest-sample
// rounding), overlapping windows are blended with a raised-cosine cross-fade
// (capped, centred on the R-R midpoint), and gaps are filled by linear
// interpolation between the neighbouring beats' baselines.
AssembledSignal assemble(const FeatureTrajectory& trajectory, const BeatStore& store,
                         const MatchWeights& weights, const CandidateMode& mode,
                         const SmoothingConfig& smoothing = {}, int fs = 128);

struct MatchHistogram {
  std::vector<double> edges;         // bin boundaries, half-open [e_i, e_{i+1})
  std::vector<std::size_t> counts;   // edges.size() - 1 bins
  std::size_t overflow = 0;          // values >= edges.back()
};

// Histogram of per-feature absolute matching differences over given edges.
MatchHistogram match_histogram(const std::vector<MatchRecord>& matches,
                               const std::vector<std::string>& schema, const std::string& feature,
                               const std::vector<double>& edges);

// The published R-amplitude bin layout: 0.01 mV bins up to 0.07, then overflow.
std::vector<double> ramp_histogram_edges();

}  // namespace ecglong
