#include "ecglong/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ecglong/errors.hpp"
#include "ecglong/random.hpp"

namespace ecglong {

MatchRecord match_beat(const FeatureVector& target, const std::vector<std::string>& schema,
                       const BeatStore& store, const MatchWeights& weights, const CandidateMode& mode) {
  const std::size_t d = schema.size();
  if (schema != store.schema())
    fail(Errc::schema_mismatch, "match_beat: target schema differs from store schema");
  if (target.values.size() != d) fail(Errc::schema_mismatch, "match_beat: target row width differs from schema");
  if (!weights.weights.empty() && weights.weights.size() != d)
    fail(Errc::schema_mismatch, "match_beat: weight vector width differs from schema");

  std::vector<double> w(weights.weights.empty() ? std::vector<double>(d, 1.0) : weights.weights);
  bool any_positive = false;
  for (double x : w) {
    if (x < 0.0) fail(Errc::invalid_config, "match_beat: weights must be non-negative");
    any_positive = any_positive || x > 0.0;
  }
  if (!any_positive) fail(Errc::invalid_config, "match_beat: at least one weight must be positive");

  // Pre-scale target and weights once; a zero-spread feature is identical on
  // every candidate, so its standardized scale only shifts the cost.
  std::vector<double> scale(d, 1.0);
  if (weights.standardize) {
    const auto& stats = store.descriptor_stats();
    for (std::size_t k = 0; k < d; ++k) scale[k] = stats.stddev[k] > 1e-12 ? stats.stddev[k] : 1.0;
  }

  const auto pool = candidates(store, target.label, mode);
  std::size_t best_index = pool.front();
  double best_cost = std::numeric_limits<double>::infinity();
  std::int64_t best_id = 0;
  for (const std::size_t idx : pool) {
    const double* g = store.descriptor_row(idx);
    double cost = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = (target.values[k] - g[k]) / scale[k];
      cost += w[k] * diff * diff;
    }
    const std::int64_t id = store.beats()[idx].id;
    if (cost < best_cost || (cost == best_cost && id < best_id)) {
      best_cost = cost;
      best_id = id;
      best_index = idx;
    }
  }

  MatchRecord rec;
  rec.target = target;
  rec.beat_id = best_id;
  rec.cost = best_cost;
  rec.candidates_evaluated = pool.size();
  const double* g = store.descriptor_row(best_index);
  rec.chosen_descriptors.assign(g, g + d);
  rec.abs_diff.resize(d);
  for (std::size_t k = 0; k < d; ++k) rec.abs_diff[k] = std::abs(target.values[k] - g[k]);
  return rec;
}

AssembledSignal assemble(const FeatureTrajectory& trajectory, const BeatStore& store,
                         const MatchWeights& weights, const CandidateMode& mode,
                         const SmoothingConfig& smoothing, int fs) {
  if (trajectory.rows.empty()) fail(Errc::empty_input, "assemble: empty trajectory");
  for (const auto& row : trajectory.rows)
    if (!store.has_label(row.label))
      fail(Errc::label_empty, std::string("assemble: store has no beats labelled ") + to_string(row.label));

  const std::size_t n = trajectory.size();
  const std::size_t r_int_col = trajectory.feature_index("R_Int");
  const int pre_r = store.window().pre_r;
  const int post_r = store.window().post_r;

  AssembledSignal out;
  out.signal.fs = fs;
  out.signal.channel_name = "synthetic";
  out.matches.reserve(n);
  out.r_indices.reserve(n);

  // Per-interval nearest-sample rounding keeps every placed R-R spacing
  // exactly the rounded target.
  std::vector<std::int64_t> r_spacing(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ms = trajectory.rows[i].values[r_int_col];
    const std::int64_t samples = std::llround(ms * fs / 1000.0);
    if (samples < 2) fail(Errc::rr_too_short, "assemble: target R-R of " + std::to_string(ms) + " ms is degenerate");
    r_spacing[i] = samples;
  }

  RandomSource seed_root(mode.seed);
  for (std::size_t i = 0; i < n; ++i) {
    CandidateMode row_mode = mode;
    if (mode.kind == CandidateMode::Kind::Sampled) row_mode.seed = seed_root.fork(i).seed();
    MatchRecord rec = match_beat(trajectory.rows[i], trajectory.schema, store, weights, row_mode);
    rec.position = i;
    out.matches.push_back(std::move(rec));
  }

  out.r_indices.push_back(pre_r);
  for (std::size_t i = 0; i + 1 < n; ++i) out.r_indices.push_back(out.r_indices.back() + r_spacing[i]);

  const std::int64_t total = out.r_indices.back() + post_r + 1;
  out.signal.samples.assign(static_cast<std::size_t>(total), 0.0);

  // Place the first beat verbatim, then append each successor resolving the
  // seam against what is already written.
  auto write_beat = [&](const std::vector<double>& wf, std::int64_t start, std::int64_t from) {
    for (std::int64_t t = from; t < static_cast<std::int64_t>(wf.size()); ++t)
      out.signal.samples[static_cast<std::size_t>(start + t)] = wf[static_cast<std::size_t>(t)];
  };
  const auto& beat0 = store.by_id(out.matches[0].beat_id).waveform;
  write_beat(beat0, 0, 0);
  std::int64_t prev_end = static_cast<std::int64_t>(beat0.size()) - 1;  // inclusive end of written data
  double prev_baseline = baseline_of(beat0);

  for (std::size_t i = 1; i < n; ++i) {
    const auto& wf = store.by_id(out.matches[i].beat_id).waveform;
    const std::int64_t start = out.r_indices[i] - pre_r;
    const std::int64_t end = start + static_cast<std::int64_t>(wf.size()) - 1;
    const double cur_baseline = baseline_of(wf);

    if (start > prev_end + 1) {
      // Gap: linear interpolation between the two boundary baselines.
      const std::int64_t gap = start - prev_end - 1;
      for (std::int64_t g = 1; g <= gap; ++g) {
        const double t = static_cast<double>(g) / static_cast<double>(gap + 1);
        out.signal.samples[static_cast<std::size_t>(prev_end + g)] =
            (1.0 - t) * prev_baseline + t * cur_baseline;
      }
      write_beat(wf, start, 0);
    } else if (start > prev_end) {
      write_beat(wf, start, 0);
    } else {
      // Overlap: raised-cosine cross-fade, capped, centred on the midpoint
      // between the two R peaks (clamped into the overlap) so neither QRS
      // complex is touched.
      const std::int64_t ov_lo = start, ov_hi = prev_end;
      const std::int64_t ov_len = ov_hi - ov_lo + 1;
      const std::int64_t fade = std::min<std::int64_t>(std::max(1, smoothing.max_crossfade), ov_len);
      const std::int64_t mid = (out.r_indices[i - 1] + out.r_indices[i]) / 2;
      std::int64_t fade_lo = std::clamp(mid - fade / 2, ov_lo, ov_hi - fade + 1);
      for (std::int64_t t = fade_lo; t <= ov_hi; ++t) {
        const double incoming = wf[static_cast<std::size_t>(t - start)];
        if (t < fade_lo + fade) {
          const double x = fade == 1 ? 1.0
                                     : static_cast<double>(t - fade_lo) / static_cast<double>(fade - 1);
          const double alpha = 0.5 * (1.0 - std::cos(std::numbers::pi * x));
          out.signal.samples[static_cast<std::size_t>(t)] =
              (1.0 - alpha) * out.signal.samples[static_cast<std::size_t>(t)] + alpha * incoming;
        } else {
          out.signal.samples[static_cast<std::size_t>(t)] = incoming;
        }
      }
      write_beat(wf, start, ov_hi + 1 - start);
    }
    prev_end = end;
    prev_baseline = cur_baseline;
  }
  return out;
}

MatchHistogram match_histogram(const std::vector<MatchRecord>& matches,
                               const std::vector<std::string>& schema, const std::string& feature,
                               const std::vector<double>& edges) {
  if (edges.size() < 2) fail(Errc::invalid_config, "match_histogram: need at least two bin edges");
  std::size_t col = schema.size();
  for (std::size_t k = 0; k < schema.size(); ++k)
    if (schema[k] == feature) col = k;
  if (col == schema.size()) fail(Errc::unknown_feature, "match_histogram: feature '" + feature + "' not in schema");

  MatchHistogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0);
  for (const auto& m : matches) {
    const double v = m.abs_diff.at(col);
    if (v >= edges.back()) {
      ++h.overflow;
      continue;
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    const std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin() - 1);
    ++h.counts[std::min(bin, h.counts.size() - 1)];
  }
  return h;
}

std::vector<double> ramp_histogram_edges() {
  return {0.00, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07};
}

}  // namespace ecglong
