#pragma once

#include <cstdint>
#include <vector>

#include "ecglong/delineate.hpp"
#include "ecglong/random.hpp"
#include "ecglong/signal.hpp"

namespace ecglong {

struct BeatSynthConfig {
  int fs = 128;
  BeatWindow window{};
  double amplitude_jitter_lo = 0.85;
  double amplitude_jitter_hi = 1.15;
  double time_warp_max = 4.0;  // samples
  ExtractionConfig extraction{};
};

/// PCA perturbation model around a mean beat. Fills the beat store with a
/// large, varied, label-conditioned population when no externally generated
/// beats are available for ingestion.
struct BeatTemplateModel {
  BeatLabel label = BeatLabel::Normal;
  std::vector<double> mean_beat;
  std::vector<std::vector<double>> principal_components;  // K x W, orthonormal rows
  std::vector<double> component_scales;                   // K standard deviations, descending
  BeatSynthConfig config{};
};

// Mean beat plus the top-k principal directions of the centered population.
// Requires at least max(20, k+1) beats of identical length.
BeatTemplateModel fit_template(const std::vector<std::vector<double>>& beats, BeatLabel label, int k,
                               const BeatSynthConfig& config = {});

// Perturb the template: PCA coefficients ~ N(0, scale), uniform amplitude
// jitter, bounded time warp (index remapping with linear interpolation),
// re-anchor the extremum at pre_r, then delineate to fill the descriptors.
// Beats whose delineation finds no R near the anchor are rejected and
// redrawn. Deterministic given the random source; beat i draws only from the
// fork()ed child stream i, so populations are order-stable.
std::vector<BeatRecord> generate_beats(const BeatTemplateModel& model, std::size_t count,
                                       RandomSource& rng, std::int64_t first_id = 0);

// Descriptor row for a single standalone beat (delineation on the
// baseline-padded waveform; inter-beat interval falls back to the configured
// default). Used for both generated and ingested beats.
std::map<std::string, double> beat_descriptors(const std::vector<double>& waveform, BeatLabel label,
                                               const BeatSynthConfig& config);

// Analytic PQRST templates built from Gaussian bumps; the demo data
// generator and the test fixtures build signals out of these.
std::vector<double> analytic_template(const BeatWindow& window, int fs, BeatLabel label);

}  // namespace ecglong
