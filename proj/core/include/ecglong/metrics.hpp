#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ecglong/delineate.hpp"

namespace ecglong {

// Dynamic time warping distance with |a_i - b_j| local cost, full window,
// boundary-to-boundary path.
double dtw_distance(const std::vector<double>& a, const std::vector<double>& b);

// Discrete Fréchet distance between two curves indexed by position, with
// absolute difference of values as the ground metric.
double frechet_distance(const std::vector<double>& a, const std::vector<double>& b);

struct PointwiseErrors {
  double euclidean = 0, rmse = 0, mae = 0, mse = 0, prd = 0;
};

// Equal-length elementwise error summary; PRD = 100 * sqrt(sum((a-b)^2) / sum(a^2)).
PointwiseErrors pointwise_errors(const std::vector<double>& a, const std::vector<double>& b);

struct DivergenceParams {
  int bins = 50;
  double smoothing = 1e-10;
  // MMD is quadratic in the sample count; sides larger than this are strided
  // down deterministically before the kernel sums. Other metrics stay exact.
  std::size_t mmd_max_samples = 512;
};

struct Divergences {
  double kl = 0, js = 0, mmd = 0, wasserstein = 0, ks = 0;
  double mean_diff = 0, var_diff = 0, skew_diff = 0;  // signed, x minus y
};

// Two-sample distributional comparison. KL/JS use histograms over the pooled
// range with additive smoothing and natural log; MMD is the biased squared
// estimator with a median-heuristic RBF kernel; Wasserstein-1 couples sorted
// samples / quantile functions; KS is the max ECDF gap.
Divergences divergences(const std::vector<double>& x, const std::vector<double>& y,
                        const DivergenceParams& params = {});

double ks_statistic(const std::vector<double>& x, const std::vector<double>& y);
double wasserstein1(const std::vector<double>& x, const std::vector<double>& y);

struct DensityHeatmap {
  std::vector<double> bin_edges;            // shared amplitude grid, bins+1 edges
  std::vector<std::vector<double>> diff;    // [timestep][bin], generated minus original
};

// Per-timestep amplitude density difference between two beat populations
// over a shared 50-bin grid spanning the pooled amplitude range.
DensityHeatmap density_heatmap(const std::vector<std::vector<double>>& original,
                               const std::vector<std::vector<double>>& generated, int bins = 50);

struct BeatPopulationSummary {
  std::vector<double> mean;
  std::vector<double> stddev;  // population convention
};

BeatPopulationSummary beat_population_summary(const std::vector<std::vector<double>>& beats);

/// Scalar fidelity summary between two beat populations: shape distances on
/// the average beats plus per-timestep distributional divergences averaged
/// across timesteps.
struct MetricReport {
  double dtw_distance = 0, frechet_distance = 0, euclidean_distance = 0;
  double rmse = 0, mae = 0, mse = 0, prd = 0;
  double avg_kl_divergence = 0, avg_js_divergence = 0, avg_mmd = 0;
  double avg_wasserstein_distance = 0, avg_ks_statistic = 0;
  double avg_mean_difference = 0;       // signed
  double avg_variance_difference = 0;   // averaged magnitudes, >= 0
  double avg_skewness_difference = 0;   // signed

  std::vector<std::pair<std::string, double>> named() const;
};

MetricReport compare_beat_populations(const std::vector<std::vector<double>>& original,
                                      const std::vector<std::vector<double>>& generated,
                                      const DivergenceParams& params = {});

struct FeatureDivergenceRow {
  std::string feature;
  std::string unit;  // "mV", "ms" or "samples"
  Divergences stats;
};

// Per-feature real-vs-synthetic divergence table. Interval features are
// reported twice, once in ms and once in samples.
std::vector<FeatureDivergenceRow> feature_divergences(const FeatureTrajectory& real,
                                                      const FeatureTrajectory& synthetic, int fs,
                                                      const DivergenceParams& params = {});

}  // namespace ecglong
