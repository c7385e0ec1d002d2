#include "ecglong/feature_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ecglong/errors.hpp"

namespace ecglong {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Acklam's rational approximation for the inverse normal CDF, refined with
// one Halley step against erfc; accurate to ~1e-15 over (0, 1).
double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Eigen::MatrixXd project_to_psd(const Eigen::MatrixXd& m, double eigen_floor) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], eigen_floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  // Discrete Lyapunov equation S = A S A^T + Q via the d^2 x d^2 linear system
  // (I - A (x) A) vec(S) = vec(Q).
  const Eigen::Index d = a.rows();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) sys(i * d + j, k * d + l) -= a(i, k) * a(j, l);
  Eigen::VectorXd vec_q(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) vec_q[i * d + j] = q(i, j);
  const Eigen::VectorXd vec_s = sys.colPivHouseholderQr().solve(vec_q);
  Eigen::MatrixXd s(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) s(i, j) = vec_s[i * d + j];
  return project_to_psd(s, 0.0);
}

MarginalModel::MarginalModel(std::string feature_name, std::vector<double> samples)
    : name_(std::move(feature_name)), values_(std::move(samples)) {
  if (values_.empty()) fail(Errc::empty_input, "MarginalModel: no samples");
  std::sort(values_.begin(), values_.end());
  degenerate_ = values_.front() == values_.back();
}

double MarginalModel::cdf(double x) const {
  const double n = static_cast<double>(values_.size());
  const auto lo = std::lower_bound(values_.begin(), values_.end(), x);
  const auto hi = std::upper_bound(values_.begin(), values_.end(), x);
  const double below = static_cast<double>(lo - values_.begin());
  const double ties = static_cast<double>(hi - lo);
  return (below + 0.5 * ties) / n;
}

double MarginalModel::inverse_cdf(double u) const {
  const std::size_t n = values_.size();
  if (degenerate_ || n == 1) return values_.front();
  const double pos = u * static_cast<double>(n) - 0.5;  // plotting position (i + 0.5)/n
  if (pos <= 0.0) return values_.front();
  if (pos >= static_cast<double>(n - 1)) return values_.back();
  const auto i = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(i);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

std::vector<bool> CopulaVarModel::degenerate_features() const {
  std::vector<bool> flags;
  flags.reserve(marginals.size());
  for (const auto& m : marginals) flags.push_back(m.degenerate());
  return flags;
}

namespace {

// Latent coordinates via midrank transform: z_i = Phi^-1((rank_i + 0.5) / n).
std::vector<double> rank_to_latent(const std::vector<double>& column) {
  const std::size_t n = column.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  std::vector<double> z(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && column[order[j + 1]] == column[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j);  // zero-based
    const double u = (midrank + 0.5) / static_cast<double>(n);
    const double value = normal_quantile(u);
    for (std::size_t k = i; k <= j; ++k) z[order[k]] = value;
    i = j + 1;
  }
  return z;
}

int label_index(BeatLabel l) { return l == BeatLabel::Normal ? 0 : 1; }

}  // namespace

CopulaVarModel fit_copula_var(const FeatureTrajectory& trajectory) {
  const std::size_t n = trajectory.size();
  const std::size_t d = trajectory.dim();
  if (d == 0) fail(Errc::empty_input, "fit_copula_var: empty schema");
  if (n < 10 * d)
    fail(Errc::insufficient_data, "fit_copula_var: need at least " + std::to_string(10 * d) +
                                      " rows for d=" + std::to_string(d) + ", got " + std::to_string(n));

  CopulaVarModel model;
  model.schema = trajectory.schema;

  Eigen::MatrixXd z(n, d);
  for (std::size_t k = 0; k < d; ++k) {
    auto column = trajectory.column(k);
    model.marginals.emplace_back(trajectory.schema[k], column);
    if (model.marginals.back().degenerate()) {
      z.col(static_cast<Eigen::Index>(k)).setZero();
    } else {
      const auto latent = rank_to_latent(column);
      for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = latent[i];
    }
  }

  // Contemporaneous latent correlation; degenerate columns get zero
  // off-diagonals and a unit diagonal.
  Eigen::VectorXd mean = z.colwise().mean();
  Eigen::MatrixXd centered = z.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
      if (i == j) continue;
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      corr(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;
    }
  corr = project_to_psd(corr, 1e-10);
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    const double s = std::sqrt(corr(i, i));
    if (s > 0.0) {
      corr.row(i) /= s;
      corr.col(i) /= s;
    }
    corr(i, i) = 1.0;
  }
  model.latent_corr = corr;

  // VAR(1) by least squares of z_{n+1} on z_n.
  Eigen::MatrixXd z0 = centered.topRows(static_cast<Eigen::Index>(n - 1));
  Eigen::MatrixXd z1 = centered.bottomRows(static_cast<Eigen::Index>(n - 1));
  Eigen::MatrixXd gram = z0.transpose() * z0;
  gram += 1e-9 * Eigen::MatrixXd::Identity(d, d);  // keeps degenerate columns solvable
  Eigen::MatrixXd a = (gram.ldlt().solve(z0.transpose() * z1)).transpose();
  const auto degenerate = model.degenerate_features();
  for (std::size_t k = 0; k < d; ++k)
    if (degenerate[k]) {
      a.row(static_cast<Eigen::Index>(k)).setZero();
      a.col(static_cast<Eigen::Index>(k)).setZero();
    }
  // Stationarity guard; least squares on stationary data stays inside the
  // unit circle, this only clips pathological fits.
  const double radius = a.eigenvalues().cwiseAbs().maxCoeff();
  if (radius >= 0.98) a *= 0.98 / radius;
  model.lag1_coeff = a;

  Eigen::MatrixXd resid = z1 - z0 * a.transpose();
  Eigen::MatrixXd noise = resid.transpose() * resid / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < d; ++k)
    if (degenerate[k]) {
      noise.row(static_cast<Eigen::Index>(k)).setZero();
      noise.col(static_cast<Eigen::Index>(k)).setZero();
    }
  model.noise_cov = project_to_psd(noise, 1e-10);

  // Label bigrams with add-one smoothing.
  double counts[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (std::size_t i = 0; i + 1 < n; ++i)
    counts[label_index(trajectory.rows[i].label)][label_index(trajectory.rows[i + 1].label)] += 1.0;
  for (int from = 0; from < 2; ++from) {
    const double total = counts[from][0] + counts[from][1] + 2.0;
    model.label_transition[from][0] = (counts[from][0] + 1.0) / total;
    model.label_transition[from][1] = (counts[from][1] + 1.0) / total;
  }
  return model;
}

FeatureTrajectory sample(const CopulaVarModel& model, std::size_t n_beats, RandomSource& rng) {
  if (n_beats == 0) fail(Errc::empty_input, "sample: n_beats must be >= 1");
  const Eigen::Index d = static_cast<Eigen::Index>(model.dim());

  const Eigen::MatrixXd stat_cov = stationary_covariance(model.lag1_coeff, model.noise_cov);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_s(stat_cov);
  Eigen::VectorXd ev_s = es_s.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd sqrt_stat = es_s.eigenvectors() * ev_s.cwiseSqrt().asDiagonal() * es_s.eigenvectors().transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_q(model.noise_cov);
  Eigen::VectorXd ev_q = es_q.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd sqrt_noise = es_q.eigenvectors() * ev_q.cwiseSqrt().asDiagonal() * es_q.eigenvectors().transpose();

  // Model-implied stationary scale normalizes the latent coordinates before
  // the Gaussian CDF so the copula sees unit-variance inputs.
  Eigen::VectorXd stat_std(d);
  for (Eigen::Index k = 0; k < d; ++k) stat_std[k] = std::max(std::sqrt(stat_cov(k, k)), 1e-12);

  // Draw order is fixed: the whole latent sequence first, then labels.
  Eigen::MatrixXd z(n_beats, d);
  Eigen::VectorXd eps(d);
  Eigen::VectorXd state(d);
  for (Eigen::Index k = 0; k < d; ++k) eps[k] = rng.normal();
  state = sqrt_stat * eps;
  z.row(0) = state.transpose();
  for (std::size_t i = 1; i < n_beats; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) eps[k] = rng.normal();
    state = model.lag1_coeff * state + sqrt_noise * eps;
    z.row(static_cast<Eigen::Index>(i)) = state.transpose();
  }

  FeatureTrajectory out;
  out.schema = model.schema;
  out.rows.resize(n_beats);
  for (std::size_t i = 0; i < n_beats; ++i) {
    auto& v = out.rows[i].values;
    v.resize(model.dim());
    for (Eigen::Index k = 0; k < d; ++k) {
      const double u = normal_cdf(z(static_cast<Eigen::Index>(i), k) / stat_std[k]);
      v[static_cast<std::size_t>(k)] = model.marginals[static_cast<std::size_t>(k)].inverse_cdf(u);
    }
  }

  // Labels from the Markov chain, initialized at its stationary distribution.
  const double to_abnormal = model.label_transition[0][1];
  const double to_normal = model.label_transition[1][0];
  const double p_abnormal = to_abnormal + to_normal > 0.0 ? to_abnormal / (to_abnormal + to_normal) : 0.0;
  int state_label = rng.uniform() < p_abnormal ? 1 : 0;
  out.rows[0].label = state_label == 0 ? BeatLabel::Normal : BeatLabel::Abnormal;
  for (std::size_t i = 1; i < n_beats; ++i) {
    state_label = rng.uniform() < model.label_transition[state_label][1] ? 1 : 0;
    out.rows[i].label = state_label == 0 ? BeatLabel::Normal : BeatLabel::Abnormal;
  }
  return out;
}

BlockBootstrapModel fit_block_bootstrap(const FeatureTrajectory& trajectory, std::size_t block_len) {
  if (trajectory.rows.empty()) fail(Errc::empty_input, "fit_block_bootstrap: empty trajectory");
  BlockBootstrapModel model;
  model.training = trajectory;
  model.block_len = std::max<std::size_t>(1, std::min(block_len, trajectory.size()));
  return model;
}

FeatureTrajectory sample(const BlockBootstrapModel& model, std::size_t n_beats, RandomSource& rng) {
  if (n_beats == 0) fail(Errc::empty_input, "sample: n_beats must be >= 1");
  FeatureTrajectory out;
  out.schema = model.training.schema;
  out.rows.reserve(n_beats);
  const std::size_t n = model.training.size();
  const std::size_t starts = n - model.block_len + 1;
  while (out.rows.size() < n_beats) {
    const std::size_t start = static_cast<std::size_t>(rng.uniform_int(starts));
    for (std::size_t i = 0; i < model.block_len && out.rows.size() < n_beats; ++i)
      out.rows.push_back(model.training.rows[start + i]);
  }
  return out;
}

const char* to_string(FeatureModelKind kind) {
  return kind == FeatureModelKind::CopulaVar ? "copula_var" : "block_bootstrap";
}

FeatureModelKind feature_model_kind_from_string(const std::string& s) {
  if (s == "copula_var") return FeatureModelKind::CopulaVar;
  if (s == "block_bootstrap") return FeatureModelKind::BlockBootstrap;
  fail(Errc::invalid_config, "unknown feature model kind '" + s + "'");
}

const std::vector<std::string>& FeatureModel::schema() const {
  if (const auto* m = std::get_if<CopulaVarModel>(&impl)) return m->schema;
  return std::get<BlockBootstrapModel>(impl).training.schema;
}

FeatureModel fit_feature_model(FeatureModelKind kind, const FeatureTrajectory& trajectory,
                               std::size_t block_len) {
  FeatureModel m;
  if (kind == FeatureModelKind::CopulaVar)
    m.impl = fit_copula_var(trajectory);
  else
    m.impl = fit_block_bootstrap(trajectory, block_len);
  return m;
}

FeatureTrajectory sample(const FeatureModel& model, std::size_t n_beats, RandomSource& rng) {
  if (const auto* m = std::get_if<CopulaVarModel>(&model.impl)) return sample(*m, n_beats, rng);
  return sample(std::get<BlockBootstrapModel>(model.impl), n_beats, rng);
}

CorrelationMatrix feature_correlations(const FeatureTrajectory& trajectory) {
  const std::size_t n = trajectory.size();
  const std::size_t d = trajectory.dim();
  if (n < 3) fail(Errc::insufficient_data, "feature_correlations: need at least 3 rows");

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = trajectory.rows[i].values[k];
  const Eigen::VectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

  CorrelationMatrix out;
  out.pearson = Eigen::MatrixXd::Identity(d, d);
  out.degenerate.assign(d, false);
  for (std::size_t k = 0; k < d; ++k) out.degenerate[k] = cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) <= 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
      if (i == j) continue;
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      out.pearson(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;
    }
  return out;
}

}  // namespace ecglong
