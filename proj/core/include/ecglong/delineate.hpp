#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecglong/signal.hpp"

namespace ecglong {

/// Fiducial points of one beat. p/q/s/t are absent when their search window
/// does not fit inside the signal; amplitudes are only meaningful when the
/// matching index is present.
struct FiducialPoints {
  std::int64_t r_index = 0;
  double r_amp = 0.0;
  std::optional<std::int64_t> p_index, q_index, s_index, t_index;
  double p_amp = 0.0, q_amp = 0.0, s_amp = 0.0, t_amp = 0.0;
};

/// Per-beat descriptor row. Values align with the owning trajectory's schema.
struct FeatureVector {
  std::vector<double> values;
  BeatLabel label = BeatLabel::Normal;
};

/// Ordered sequence of per-beat feature rows plus the feature-name schema
/// every row conforms to.
struct FeatureTrajectory {
  std::vector<std::string> schema;
  std::vector<FeatureVector> rows;

  std::size_t dim() const { return schema.size(); }
  std::size_t size() const { return rows.size(); }
  std::size_t feature_index(const std::string& name) const;  // throws unknown_feature
  std::vector<double> column(std::size_t k) const;
};

// Intervals in ms, amplitudes in mV. S-wave values are delineated but kept
// out of the default schema.
const std::vector<std::string>& default_schema();
bool is_interval_feature(const std::string& name);

struct DetectorConfig {
  double integration_window_s = 0.150;  // moving-window integration width
  double envelope_max_window_s = 2.0;   // rolling window for the adaptive threshold
  double threshold_fraction = 0.4;
  double refractory_s = 0.200;
};

// Squared-derivative energy envelope (centred moving-window integral) that
// drives R detection; exposed so tests can check peak gating directly.
std::vector<double> detection_envelope(const Signal& signal, const DetectorConfig& config = {});

// R-peak detection: derivative -> squaring -> 150 ms integration -> adaptive
// threshold at 0.4x the rolling 2 s envelope max, 200 ms refractory. Each
// envelope peak is refined to the largest-|amplitude| sample nearby, so the
// returned indices sit on the R tips themselves.
std::vector<std::int64_t> detect_r_peaks(const Signal& signal, const DetectorConfig& config = {});

// Localize P/Q/S/T around a detected R: Q = argmin in (r-80ms, r),
// S = argmin in (r, r+80ms), P = argmax in (r-240ms, r-80ms),
// T = argmax in (r+80ms, r+360ms). A wave is absent when its window leaves
// the signal; ties resolve toward the R.
FiducialPoints delineate(const Signal& signal, std::int64_t r_index);

struct ExtractionConfig {
  // Fallbacks when a feature has no observed value anywhere in the
  // trajectory and the median imputation has nothing to work with.
  double default_r_int_ms = 800.0;
  double default_p_int_ms = 160.0;
  double default_q_int_ms = 40.0;
  double default_t_int_ms = 240.0;
  double default_amp_mv = 0.0;
};

// Build the feature matrix: one row per beat, default schema, intervals in
// ms. R_Int of row n is the spacing to beat n+1; the last row (and any beat
// with a missing fiducial) is imputed with the per-feature trajectory median.
FeatureTrajectory extract_features(const Signal& signal, const std::vector<FiducialPoints>& beats,
                                   const std::vector<BeatLabel>& labels, const ExtractionConfig& config = {});

}  // namespace ecglong
