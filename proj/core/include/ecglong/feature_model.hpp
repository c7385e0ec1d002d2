#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <variant>
#include <vector>

#include "ecglong/delineate.hpp"
#include "ecglong/random.hpp"

namespace ecglong {

/// Empirical marginal distribution of one feature: sorted training values
/// with a piecewise-linear quantile function clamped to the training support.
class MarginalModel {
 public:
  MarginalModel() = default;
  MarginalModel(std::string feature_name, std::vector<double> samples);

  const std::string& feature_name() const { return name_; }
  const std::vector<double>& sorted_values() const { return values_; }
  bool degenerate() const { return degenerate_; }

  // Mid-distribution ECDF: (#below + half the ties) / n.
  double cdf(double x) const;
  // Linear interpolation between order statistics at plotting positions
  // (i + 0.5) / n; clamped to [min, max], no extrapolated tails.
  double inverse_cdf(double u) const;

 private:
  std::string name_;
  std::vector<double> values_;  // sorted
  bool degenerate_ = false;     // constant training column
};

/// Gaussian copula over per-feature empirical marginals with a latent VAR(1)
/// for inter-beat dependence and a two-state Markov chain over beat labels.
struct CopulaVarModel {
  std::vector<std::string> schema;
  std::vector<MarginalModel> marginals;
  Eigen::MatrixXd latent_corr;  // contemporaneous latent correlation, unit diagonal
  Eigen::MatrixXd lag1_coeff;   // z_{n+1} = lag1_coeff * z_n + e_n
  Eigen::MatrixXd noise_cov;    // innovation covariance, PSD
  std::array<std::array<double, 2>, 2> label_transition{};  // row-stochastic, [from][to]

  std::size_t dim() const { return schema.size(); }
  std::vector<bool> degenerate_features() const;
};

// Rank-transform the rows to latent Gaussian space, fit the VAR(1) by least
// squares, project the residual covariance to the nearest PSD matrix, and
// fit the label bigram chain with add-one smoothing. Requires N >= 10*d.
CopulaVarModel fit_copula_var(const FeatureTrajectory& trajectory);

// Stationary latent simulation mapped through the Gaussian CDF and the
// per-feature quantile functions. Deterministic given the random source.
FeatureTrajectory sample(const CopulaVarModel& model, std::size_t n_beats, RandomSource& rng);

/// Distribution-free baseline: resample contiguous training blocks.
struct BlockBootstrapModel {
  FeatureTrajectory training;
  std::size_t block_len = 8;
};

BlockBootstrapModel fit_block_bootstrap(const FeatureTrajectory& trajectory, std::size_t block_len = 8);
FeatureTrajectory sample(const BlockBootstrapModel& model, std::size_t n_beats, RandomSource& rng);

enum class FeatureModelKind { CopulaVar, BlockBootstrap };

const char* to_string(FeatureModelKind kind);
FeatureModelKind feature_model_kind_from_string(const std::string& s);

/// Either feature-synthesis strategy behind one interface.
struct FeatureModel {
  std::variant<CopulaVarModel, BlockBootstrapModel> impl;

  FeatureModelKind kind() const {
    return std::holds_alternative<CopulaVarModel>(impl) ? FeatureModelKind::CopulaVar
                                                        : FeatureModelKind::BlockBootstrap;
  }
  const std::vector<std::string>& schema() const;
};

FeatureModel fit_feature_model(FeatureModelKind kind, const FeatureTrajectory& trajectory,
                               std::size_t block_len = 8);
FeatureTrajectory sample(const FeatureModel& model, std::size_t n_beats, RandomSource& rng);

struct CorrelationMatrix {
  Eigen::MatrixXd pearson;       // unit diagonal, symmetric
  std::vector<bool> degenerate;  // constant features, reported as zero correlation
};

// Pearson correlations between feature columns (Fig.-4-style comparison input).
CorrelationMatrix feature_correlations(const FeatureTrajectory& trajectory);

// Shared numeric helpers (also used by tests).
double normal_cdf(double x);
double normal_quantile(double p);  // inverse standard normal CDF
Eigen::MatrixXd project_to_psd(const Eigen::MatrixXd& m, double eigen_floor = 1e-10);
Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& lag1_coeff, const Eigen::MatrixXd& noise_cov);

}  // namespace ecglong
