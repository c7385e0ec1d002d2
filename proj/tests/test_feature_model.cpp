#include <cmath>

#include "doctest.h"
#include "ecglong/errors.hpp"
#include "ecglong/feature_model.hpp"
#include "ecglong/metrics.hpp"
#include "helpers.hpp"

using namespace ecglong;

namespace {

FeatureTrajectory iid_normal_trajectory(std::size_t n, std::size_t d, std::uint64_t seed) {
  FeatureTrajectory t;
  for (std::size_t k = 0; k < d; ++k) t.schema.push_back("f" + std::to_string(k));
  RandomSource rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector row;
    for (std::size_t k = 0; k < d; ++k) row.values.push_back(rng.normal());
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Latent VAR(1) with coefficient a*I and unit stationary variance, observed
// directly as features.
FeatureTrajectory var1_trajectory(std::size_t n, std::size_t d, double a, std::uint64_t seed) {
  FeatureTrajectory t;
  for (std::size_t k = 0; k < d; ++k) t.schema.push_back("f" + std::to_string(k));
  RandomSource rng(seed);
  std::vector<double> state(d);
  const double noise_std = std::sqrt(1.0 - a * a);
  for (double& z : state) z = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector row;
    row.values = state;
    t.rows.push_back(std::move(row));
    for (double& z : state) z = a * z + noise_std * rng.normal();
  }
  return t;
}

double lag1_autocorr(const std::vector<double>& v) {
  const std::size_t n = v.size();
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (v[i] - mean) * (v[i] - mean);
    if (i + 1 < n) num += (v[i] - mean) * (v[i + 1] - mean);
  }
  return num / den;
}

}  // namespace

TEST_CASE("marginal model: quantile round trip stays within one gap") {
  RandomSource rng(51);
  auto samples = testutil::random_vector(rng, 200, -3, 5);
  MarginalModel m("f", samples);
  std::sort(samples.begin(), samples.end());
  double max_gap = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) max_gap = std::max(max_gap, samples[i] - samples[i - 1]);
  for (double x : samples) CHECK(std::abs(m.inverse_cdf(m.cdf(x)) - x) <= max_gap + 1e-12);
  // Clamped to the support.
  CHECK(m.inverse_cdf(0.0) == samples.front());
  CHECK(m.inverse_cdf(1.0) == samples.back());
  // Non-decreasing.
  for (double u = 0.0; u < 1.0; u += 0.01) CHECK(m.inverse_cdf(u) <= m.inverse_cdf(u + 0.01) + 1e-15);
}

TEST_CASE("normal quantile inverts the normal cdf") {
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
}

TEST_CASE("fit on iid normals finds no structure") {
  const auto traj = iid_normal_trajectory(5000, 2, 52);
  const auto model = fit_copula_var(traj);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(model.lag1_coeff(i, j)) < 0.1);
      if (i != j) CHECK(std::abs(model.latent_corr(i, j)) < 0.1);
    }
}

TEST_CASE("fit recovers a known VAR(1) coefficient") {
  const auto traj = var1_trajectory(5000, 2, 0.6, 53);
  const auto model = fit_copula_var(traj);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(model.lag1_coeff(i, i) - 0.6) < 0.1);
  CHECK(std::abs(model.lag1_coeff(0, 1)) < 0.1);
  CHECK(std::abs(model.lag1_coeff(1, 0)) < 0.1);
}

TEST_CASE("fit requires 10 d rows") {
  const auto traj = iid_normal_trajectory(19, 2, 54);
  try {
    fit_copula_var(traj);
    FAIL("expected insufficient_data");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_data);
  }
}

TEST_CASE("constant features are flagged degenerate and sample exactly") {
  FeatureTrajectory traj = iid_normal_trajectory(200, 2, 55);
  traj.schema.push_back("const");
  for (auto& row : traj.rows) row.values.push_back(7.25);
  const auto model = fit_copula_var(traj);
  const auto degenerate = model.degenerate_features();
  CHECK(degenerate == std::vector<bool>{false, false, true});

  RandomSource rng(56);
  const auto sampled = sample(model, 500, rng);
  for (const auto& row : sampled.rows) CHECK(row.values[2] == 7.25);
}

TEST_CASE("model invariants hold after fitting") {
  const auto traj = var1_trajectory(2000, 3, 0.4, 57);
  const auto model = fit_copula_var(traj);

  // latent_corr: symmetric PSD with unit diagonal.
  for (int i = 0; i < 3; ++i) {
    CHECK(model.latent_corr(i, i) == doctest::Approx(1.0));
    for (int j = 0; j < 3; ++j) CHECK(model.latent_corr(i, j) == doctest::Approx(model.latent_corr(j, i)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.latent_corr);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esq(model.noise_cov);
  CHECK(esq.eigenvalues().minCoeff() >= -1e-12);

  // Spectral radius below one.
  CHECK(model.lag1_coeff.eigenvalues().cwiseAbs().maxCoeff() < 1.0);

  // Row-stochastic label transitions.
  for (int a = 0; a < 2; ++a)
    CHECK(model.label_transition[a][0] + model.label_transition[a][1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampling: support, determinism, single row") {
  const auto traj = var1_trajectory(1000, 2, 0.5, 58);
  const auto model = fit_copula_var(traj);

  RandomSource rng1(59), rng2(59);
  const auto one = sample(model, 1, rng1);
  REQUIRE(one.size() == 1);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& values = model.marginals[k].sorted_values();
    CHECK(one.rows[0].values[k] >= values.front());
    CHECK(one.rows[0].values[k] <= values.back());
  }

  const auto a = sample(model, 200, rng2);
  RandomSource rng3(59);
  const auto b = sample(model, 200, rng3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.rows[i].values == b.rows[i].values);
    CHECK(a.rows[i].label == b.rows[i].label);
  }
}

TEST_CASE("sampling zero-autocorrelation data yields near-zero lag-1 autocorrelation") {
  const auto traj = iid_normal_trajectory(3000, 2, 60);
  const auto model = fit_copula_var(traj);
  RandomSource rng(61);
  const auto sampled = sample(model, 5000, rng);
  for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(lag1_autocorr(sampled.column(k))) < 0.1);
}

TEST_CASE("sampled marginals and correlations track the training data") {
  // Correlated, autocorrelated non-Gaussian features.
  FeatureTrajectory traj;
  traj.schema = {"a", "b", "c"};
  RandomSource rng(62);
  double z = 0;
  for (int i = 0; i < 4000; ++i) {
    z = 0.7 * z + std::sqrt(1 - 0.49) * rng.normal();
    const double u = rng.normal();
    FeatureVector row;
    row.values = {std::exp(0.3 * z), z + 0.5 * u, u * u};
    traj.rows.push_back(row);
  }
  const auto model = fit_copula_var(traj);
  RandomSource srng(63);
  const auto sampled = sample(model, 5000, srng);

  for (std::size_t k = 0; k < 3; ++k)
    CHECK(ks_statistic(sampled.column(k), traj.column(k)) < 0.05);

  const auto corr_train = feature_correlations(traj).pearson;
  const auto corr_sampled = feature_correlations(sampled).pearson;
  CHECK((corr_sampled - corr_train).norm() / 3.0 < 0.1);
}

TEST_CASE("long samples are stationary (no running-mean drift)") {
  const auto traj = var1_trajectory(3000, 2, 0.6, 64);
  const auto model = fit_copula_var(traj);
  RandomSource rng(65);
  const auto sampled = sample(model, 10000, rng);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto col = sampled.column(k);
    const std::size_t half = col.size() / 2;
    double m1 = 0, m2 = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < half; ++i) m1 += col[i];
    for (std::size_t i = half; i < col.size(); ++i) m2 += col[i];
    m1 /= static_cast<double>(half);
    m2 /= static_cast<double>(col.size() - half);
    for (std::size_t i = 0; i < half; ++i) v1 += (col[i] - m1) * (col[i] - m1);
    for (std::size_t i = half; i < col.size(); ++i) v2 += (col[i] - m2) * (col[i] - m2);
    v1 /= static_cast<double>(half);
    v2 /= static_cast<double>(col.size() - half);
    const double stderr_diff = std::sqrt(v1 / static_cast<double>(half) + v2 / static_cast<double>(col.size() - half));
    // Autocorrelated samples: widen by the AR(1) effective-sample factor.
    const double inflate = std::sqrt((1 + 0.6) / (1 - 0.6));
    CHECK(std::abs(m1 - m2) < 3.0 * stderr_diff * inflate);
  }
}

TEST_CASE("label transitions are learned from bigrams") {
  FeatureTrajectory traj = iid_normal_trajectory(400, 2, 66);
  // Blocks of 20: strong persistence.
  for (std::size_t i = 0; i < traj.rows.size(); ++i)
    traj.rows[i].label = (i / 20) % 2 == 0 ? BeatLabel::Normal : BeatLabel::Abnormal;
  const auto model = fit_copula_var(traj);
  CHECK(model.label_transition[0][0] > 0.9);
  CHECK(model.label_transition[1][1] > 0.9);

  RandomSource rng(67);
  const auto sampled = sample(model, 2000, rng);
  std::size_t abnormal = 0;
  for (const auto& row : sampled.rows) abnormal += row.label == BeatLabel::Abnormal ? 1 : 0;
  CHECK(abnormal > 600);
  CHECK(abnormal < 1400);
}

TEST_CASE("block bootstrap reproduces training rows in order") {
  const auto traj = var1_trajectory(100, 2, 0.5, 68);
  const auto model = fit_block_bootstrap(traj, 8);
  RandomSource rng(69);
  const auto sampled = sample(model, 64, rng);
  REQUIRE(sampled.size() == 64);
  // Every sampled row is a training row.
  for (const auto& row : sampled.rows) {
    bool found = false;
    for (const auto& train_row : traj.rows) found = found || train_row.values == row.values;
    CHECK(found);
  }
  // Determinism.
  RandomSource rng2(69);
  const auto again = sample(model, 64, rng2);
  for (std::size_t i = 0; i < 64; ++i) CHECK(again.rows[i].values == sampled.rows[i].values);
}

TEST_CASE("feature model wrapper dispatches by kind") {
  const auto traj = var1_trajectory(500, 2, 0.5, 70);
  for (const auto kind : {FeatureModelKind::CopulaVar, FeatureModelKind::BlockBootstrap}) {
    const auto model = fit_feature_model(kind, traj);
    CHECK(model.kind() == kind);
    RandomSource rng(71);
    CHECK(sample(model, 10, rng).size() == 10);
  }
}

TEST_CASE("feature correlations on constructed pairs") {
  FeatureTrajectory traj;
  traj.schema = {"x", "dup", "neg"};
  RandomSource rng(72);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.normal();
    traj.rows.push_back({{x, x, -x}, BeatLabel::Normal});
  }
  const auto corr = feature_correlations(traj);
  CHECK(corr.pearson(0, 1) == doctest::Approx(1.0));
  CHECK(corr.pearson(0, 2) == doctest::Approx(-1.0));

  FeatureTrajectory indep;
  indep.schema = {"a", "b"};
  RandomSource rng2(73);
  for (int i = 0; i < 5000; ++i) indep.rows.push_back({{rng2.normal(), rng2.normal()}, BeatLabel::Normal});
  CHECK(std::abs(feature_correlations(indep).pearson(0, 1)) < 0.05);

  FeatureTrajectory degen;
  degen.schema = {"a", "c"};
  for (int i = 0; i < 10; ++i) degen.rows.push_back({{static_cast<double>(i), 4.0}, BeatLabel::Normal});
  const auto dc = feature_correlations(degen);
  CHECK(dc.degenerate == std::vector<bool>{false, true});
  CHECK(dc.pearson(0, 1) == 0.0);
}
