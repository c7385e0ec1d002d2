#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ecglong/assemble.hpp"
#include "ecglong/beat_store.hpp"
#include "ecglong/beat_synth.hpp"
#include "ecglong/delineate.hpp"
#include "ecglong/feature_model.hpp"
#include "ecglong/metrics.hpp"
#include "ecglong/signal.hpp"
#include "ecglong/tstr.hpp"

namespace ecglong {

namespace fs = std::filesystem;

/// Companion metadata for a signal CSV.
struct Manifest {
  int fs = 128;
  std::string channel_name = "MLII";
  std::string units = "mV";  // must be exactly "mV"
  std::string source;
  BeatWindow window{};
};

struct MatcherConfig {
  std::string mode = "sampled";  // "sampled" | "exhaustive"
  int batch = 16;
  int max = 64;
  bool standardize = true;
  std::map<std::string, double> weights;  // per-feature; missing names default to 1

  CandidateMode candidate_mode(std::uint64_t seed) const;
  MatchWeights match_weights(const std::vector<std::string>& schema) const;
};

struct StoreConfig {
  std::size_t count_per_label = 10000;
  int pca_components = 5;
  double amplitude_jitter_lo = 0.85;
  double amplitude_jitter_hi = 1.15;
  double time_warp_max = 4.0;
};

struct FeatureModelConfig {
  std::string kind = "copula_var";  // "copula_var" | "block_bootstrap"
  std::size_t block_len = 8;
};

struct MetricParams {
  int bins = 50;
  double smoothing = 1e-10;

  DivergenceParams divergence_params() const { return {bins, smoothing}; }
};

/// Every knob of the pipeline with its default. Unknown JSON keys are
/// rejected so typos cannot silently fall back to defaults.
struct PipelineConfig {
  std::uint64_t seed = 1;
  int fs = 128;
  BeatWindow window{};
  std::vector<std::string> schema = default_schema();
  MatcherConfig matcher;
  SmoothingConfig smoothing;
  FeatureModelConfig feature_model;
  StoreConfig store;
  MetricParams metrics;

  BeatSynthConfig beat_synth_config() const;
};

// --- number formatting (shortest round-trip / fixed), locale-independent ---
std::string format_double(double v);
std::string format_fixed(double v, int precision);
double parse_double(const std::string& text, const char* context);

// --- CSV formats ---
// Signal: header "t,amplitude_mv", sample index + fixed 6-decimal amplitude.
void write_signal_csv(const fs::path& path, const Signal& signal);
Signal read_signal_csv(const fs::path& path, int fs, const std::string& channel_name = "MLII");

// Beats: header "id,label,s0..s{W-1}"; descriptors are not part of this file.
void write_beats_csv(const fs::path& path, const std::vector<BeatRecord>& beats, int width);
std::vector<BeatRecord> read_beats_csv(const fs::path& path);

// Features / trajectories: header = schema names + "label".
void write_trajectory_csv(const fs::path& path, const FeatureTrajectory& trajectory);
FeatureTrajectory read_trajectory_csv(const fs::path& path);

// --- store directory: index.json + normal.csv + abnormal.csv ---
void write_store(const fs::path& dir, const BeatStore& store, int fs);
BeatStore read_store(const fs::path& dir, int* fs_out = nullptr);

// --- JSON documents ---
void write_manifest(const fs::path& path, const Manifest& manifest);
Manifest read_manifest(const fs::path& path);

void write_pipeline_config(const fs::path& path, const PipelineConfig& config);
PipelineConfig read_pipeline_config(const fs::path& path);

void write_feature_model(const fs::path& path, const FeatureModel& model);
FeatureModel read_feature_model(const fs::path& path);

void write_metric_report_json(const fs::path& path, const MetricReport& report);
void write_metric_report_csv(const fs::path& path, const MetricReport& report);

void write_assembly_report(const fs::path& path, const AssembledSignal& assembled,
                           const std::vector<std::string>& schema, const MatchHistogram& r_amp_histogram,
                           int fs);

void write_feature_divergences_json(const fs::path& path, const std::vector<FeatureDivergenceRow>& rows);
void write_feature_divergences_csv(const fs::path& path, const std::vector<FeatureDivergenceRow>& rows);

void write_tstr_csv(const fs::path& path, const TstrReport& report);
std::string format_tstr_table(const TstrReport& report);

// --- SVG renderings (density-difference heatmap, mean +/- std overlay) ---
void write_heatmap_svg(const fs::path& path, const DensityHeatmap& heatmap);
void write_overlay_svg(const fs::path& path, const BeatPopulationSummary& original,
                       const BeatPopulationSummary& generated);

}  // namespace ecglong
