#include "ecglong/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecglong/errors.hpp"

namespace ecglong {

namespace {

void require_nonempty(const std::vector<double>& v, const char* who) {
  if (v.empty()) fail(Errc::empty_input, std::string(who) + ": empty input");
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Population central moments.
double central_moment(const std::vector<double>& v, double mu, int p) {
  double acc = 0.0;
  for (double x : v) acc += std::pow(x - mu, p);
  return acc / static_cast<double>(v.size());
}

double skewness(const std::vector<double>& v) {
  const double mu = mean_of(v);
  const double m2 = central_moment(v, mu, 2);
  if (m2 <= 0.0) return 0.0;
  return central_moment(v, mu, 3) / std::pow(m2, 1.5);
}

std::vector<double> histogram_probs(const std::vector<double>& v, double lo, double width, int bins,
                                    double smoothing) {
  std::vector<double> p(static_cast<std::size_t>(bins), 0.0);
  for (double x : v) {
    int b = width > 0.0 ? static_cast<int>((x - lo) / width) : 0;
    b = std::clamp(b, 0, bins - 1);
    p[static_cast<std::size_t>(b)] += 1.0;
  }
  double total = 0.0;
  for (double& c : p) {
    c = c / static_cast<double>(v.size()) + smoothing;
    total += c;
  }
  for (double& c : p) c /= total;
  return p;
}

double kl_from_probs(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  return acc;
}

}  // namespace

double dtw_distance(const std::vector<double>& a, const std::vector<double>& b) {
  require_nonempty(a, "dtw");
  require_nonempty(b, "dtw");
  const std::size_t n = a.size(), m = b.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Rolling single row of the (n+1) x (m+1) accumulated-cost table.
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = std::abs(a[i - 1] - b[j - 1]);
      cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double frechet_distance(const std::vector<double>& a, const std::vector<double>& b) {
  require_nonempty(a, "frechet");
  require_nonempty(b, "frechet");
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double cost = std::abs(a[0] - b[j]);
    prev[j] = j == 0 ? cost : std::max(prev[j - 1], cost);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double cost = std::abs(a[i] - b[j]);
      double reach;
      if (j == 0)
        reach = prev[0];
      else
        reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(reach, cost);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

PointwiseErrors pointwise_errors(const std::vector<double>& a, const std::vector<double>& b) {
  require_nonempty(a, "pointwise_errors");
  if (a.size() != b.size()) fail(Errc::length_mismatch, "pointwise_errors: length mismatch");
  double sq = 0.0, abs_sum = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
    abs_sum += std::abs(d);
    ref += a[i] * a[i];
  }
  if (ref == 0.0) fail(Errc::zero_reference, "pointwise_errors: PRD undefined for all-zero reference");
  PointwiseErrors e;
  e.euclidean = std::sqrt(sq);
  e.mse = sq / static_cast<double>(a.size());
  e.rmse = std::sqrt(e.mse);
  e.mae = abs_sum / static_cast<double>(a.size());
  e.prd = 100.0 * std::sqrt(sq / ref);
  return e;
}

double ks_statistic(const std::vector<double>& x, const std::vector<double>& y) {
  require_nonempty(x, "ks");
  require_nonempty(y, "ks");
  std::vector<double> xs(x), ys(y);
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double gap = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double t = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    gap = std::max(gap, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return gap;
}

double wasserstein1(const std::vector<double>& x, const std::vector<double>& y) {
  require_nonempty(x, "wasserstein1");
  require_nonempty(y, "wasserstein1");
  std::vector<double> xs(x), ys(y);
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  if (xs.size() == ys.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += std::abs(xs[i] - ys[i]);
    return acc / static_cast<double>(xs.size());
  }
  // Unequal sizes: integrate |Fx^-1(u) - Fy^-1(u)| over the merged quantile
  // breakpoints of the two step functions.
  const std::size_t n = xs.size(), m = ys.size();
  std::size_t i = 0, j = 0;
  double acc = 0.0, u = 0.0;
  while (i < n && j < m) {
    const double ux = static_cast<double>(i + 1) / static_cast<double>(n);
    const double uy = static_cast<double>(j + 1) / static_cast<double>(m);
    const double next = std::min(ux, uy);
    acc += (next - u) * std::abs(xs[i] - ys[j]);
    u = next;
    if (ux <= next) ++i;
    if (uy <= next) ++j;
  }
  return acc;
}

Divergences divergences(const std::vector<double>& x, const std::vector<double>& y,
                        const DivergenceParams& params) {
  require_nonempty(x, "divergences");
  require_nonempty(y, "divergences");

  Divergences d;
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double lo = std::min(*xmin, *ymin), hi = std::max(*xmax, *ymax);
  const double width = (hi - lo) / params.bins;
  const auto p = histogram_probs(x, lo, width, params.bins, params.smoothing);
  const auto q = histogram_probs(y, lo, width, params.bins, params.smoothing);
  d.kl = kl_from_probs(p, q);
  std::vector<double> mid(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
  d.js = 0.5 * kl_from_probs(p, mid) + 0.5 * kl_from_probs(q, mid);

  // Median pairwise distance over the pooled sample for the RBF bandwidth.
  const auto strided = [&params](const std::vector<double>& v) {
    if (v.size() <= params.mmd_max_samples) return v;
    std::vector<double> out;
    out.reserve(params.mmd_max_samples);
    for (std::size_t i = 0; i < params.mmd_max_samples; ++i)
      out.push_back(v[i * v.size() / params.mmd_max_samples]);
    return out;
  };
  const std::vector<double> xs_mmd = strided(x);
  const std::vector<double> ys_mmd = strided(y);
  std::vector<double> pooled(xs_mmd);
  pooled.insert(pooled.end(), ys_mmd.begin(), ys_mmd.end());
  std::vector<double> dists;
  dists.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = i + 1; j < pooled.size(); ++j) dists.push_back(std::abs(pooled[i] - pooled[j]));
  double bandwidth = 1.0;
  if (!dists.empty()) {
    std::sort(dists.begin(), dists.end());
    const std::size_t k = dists.size();
    bandwidth = k % 2 == 1 ? dists[k / 2] : 0.5 * (dists[k / 2 - 1] + dists[k / 2]);
    if (bandwidth == 0.0) bandwidth = 1.0;  // identical-constant inputs
  }
  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
  auto kmean = [gamma](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (double u : a)
      for (double v : b) acc += std::exp(-gamma * (u - v) * (u - v));
    return acc / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  };
  d.mmd = kmean(xs_mmd, xs_mmd) + kmean(ys_mmd, ys_mmd) - 2.0 * kmean(xs_mmd, ys_mmd);

  d.wasserstein = wasserstein1(x, y);
  d.ks = ks_statistic(x, y);
  d.mean_diff = mean_of(x) - mean_of(y);
  d.var_diff = central_moment(x, mean_of(x), 2) - central_moment(y, mean_of(y), 2);
  d.skew_diff = skewness(x) - skewness(y);
  return d;
}

namespace {

std::vector<std::vector<double>> timestep_columns(const std::vector<std::vector<double>>& beats,
                                                  std::size_t width) {
  std::vector<std::vector<double>> cols(width);
  for (auto& c : cols) c.reserve(beats.size());
  for (const auto& b : beats)
    for (std::size_t t = 0; t < width; ++t) cols[t].push_back(b[t]);
  return cols;
}

std::size_t checked_width(const std::vector<std::vector<double>>& beats, const char* who) {
  if (beats.empty()) fail(Errc::empty_input, std::string(who) + ": empty population");
  const std::size_t w = beats.front().size();
  if (w == 0) fail(Errc::empty_input, std::string(who) + ": zero-length beats");
  for (const auto& b : beats)
    if (b.size() != w) fail(Errc::length_mismatch, std::string(who) + ": ragged beat lengths");
  return w;
}

}  // namespace

DensityHeatmap density_heatmap(const std::vector<std::vector<double>>& original,
                               const std::vector<std::vector<double>>& generated, int bins) {
  const std::size_t w = checked_width(original, "density_heatmap");
  if (checked_width(generated, "density_heatmap") != w)
    fail(Errc::length_mismatch, "density_heatmap: populations have different beat lengths");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* pop : {&original, &generated})
    for (const auto& b : *pop)
      for (double v : b) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  double width = (hi - lo) / bins;
  if (width <= 0.0) width = 1.0;  // all-equal populations collapse to bin 0

  DensityHeatmap h;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.diff.assign(w, std::vector<double>(static_cast<std::size_t>(bins), 0.0));

  auto densities = [&](const std::vector<std::vector<double>>& pop, std::size_t t) {
    std::vector<double> dens(static_cast<std::size_t>(bins), 0.0);
    for (const auto& b : pop) {
      int idx = static_cast<int>((b[t] - lo) / width);
      idx = std::clamp(idx, 0, bins - 1);
      dens[static_cast<std::size_t>(idx)] += 1.0;
    }
    for (double& v : dens) v /= static_cast<double>(pop.size()) * width;
    return dens;
  };
  for (std::size_t t = 0; t < w; ++t) {
    const auto po = densities(original, t);
    const auto pg = densities(generated, t);
    for (int i = 0; i < bins; ++i)
      h.diff[t][static_cast<std::size_t>(i)] = pg[static_cast<std::size_t>(i)] - po[static_cast<std::size_t>(i)];
  }
  return h;
}

BeatPopulationSummary beat_population_summary(const std::vector<std::vector<double>>& beats) {
  const std::size_t w = checked_width(beats, "beat_population_summary");
  BeatPopulationSummary s;
  s.mean.assign(w, 0.0);
  s.stddev.assign(w, 0.0);
  for (const auto& b : beats)
    for (std::size_t t = 0; t < w; ++t) s.mean[t] += b[t];
  for (double& m : s.mean) m /= static_cast<double>(beats.size());
  for (const auto& b : beats)
    for (std::size_t t = 0; t < w; ++t) {
      const double d = b[t] - s.mean[t];
      s.stddev[t] += d * d;
    }
  for (double& v : s.stddev) v = std::sqrt(v / static_cast<double>(beats.size()));
  return s;
}

std::vector<std::pair<std::string, double>> MetricReport::named() const {
  return {
      {"dtw_distance", dtw_distance},
      {"frechet_distance", frechet_distance},
      {"euclidean_distance", euclidean_distance},
      {"rmse", rmse},
      {"mae", mae},
      {"mse", mse},
      {"prd", prd},
      {"avg_kl_divergence", avg_kl_divergence},
      {"avg_js_divergence", avg_js_divergence},
      {"avg_mmd", avg_mmd},
      {"avg_wasserstein_distance", avg_wasserstein_distance},
      {"avg_ks_statistic", avg_ks_statistic},
      {"avg_mean_difference", avg_mean_difference},
      {"avg_variance_difference", avg_variance_difference},
      {"avg_skewness_difference", avg_skewness_difference},
  };
}

MetricReport compare_beat_populations(const std::vector<std::vector<double>>& original,
                                      const std::vector<std::vector<double>>& generated,
                                      const DivergenceParams& params) {
  const std::size_t w = checked_width(original, "compare_beat_populations");
  if (checked_width(generated, "compare_beat_populations") != w)
    fail(Errc::length_mismatch, "compare_beat_populations: beat length mismatch");

  const auto avg_original = beat_population_summary(original).mean;
  const auto avg_generated = beat_population_summary(generated).mean;

  MetricReport r;
  r.dtw_distance = dtw_distance(avg_original, avg_generated);
  r.frechet_distance = frechet_distance(avg_original, avg_generated);
  const auto pe = pointwise_errors(avg_original, avg_generated);
  r.euclidean_distance = pe.euclidean;
  r.rmse = pe.rmse;
  r.mae = pe.mae;
  r.mse = pe.mse;
  r.prd = pe.prd;

  const auto cols_o = timestep_columns(original, w);
  const auto cols_g = timestep_columns(generated, w);
  for (std::size_t t = 0; t < w; ++t) {
    const auto d = divergences(cols_g[t], cols_o[t], params);  // generated vs original
    r.avg_kl_divergence += d.kl;
    r.avg_js_divergence += d.js;
    r.avg_mmd += d.mmd;
    r.avg_wasserstein_distance += d.wasserstein;
    r.avg_ks_statistic += d.ks;
    r.avg_mean_difference += d.mean_diff;
    r.avg_variance_difference += std::abs(d.var_diff);
    r.avg_skewness_difference += d.skew_diff;
  }
  const double wn = static_cast<double>(w);
  r.avg_kl_divergence /= wn;
  r.avg_js_divergence /= wn;
  r.avg_mmd /= wn;
  r.avg_wasserstein_distance /= wn;
  r.avg_ks_statistic /= wn;
  r.avg_mean_difference /= wn;
  r.avg_variance_difference /= wn;
  r.avg_skewness_difference /= wn;
  return r;
}

std::vector<FeatureDivergenceRow> feature_divergences(const FeatureTrajectory& real,
                                                      const FeatureTrajectory& synthetic, int fs,
                                                      const DivergenceParams& params) {
  if (real.schema != synthetic.schema)
    fail(Errc::schema_mismatch, "feature_divergences: trajectories use different schemas");
  if (real.rows.empty() || synthetic.rows.empty())
    fail(Errc::empty_input, "feature_divergences: empty trajectory");

  std::vector<FeatureDivergenceRow> rows;
  for (std::size_t k = 0; k < real.schema.size(); ++k) {
    const auto xr = synthetic.column(k);
    const auto yr = real.column(k);
    const bool interval = is_interval_feature(real.schema[k]);
    rows.push_back({real.schema[k], interval ? "ms" : "mV", divergences(xr, yr, params)});
    if (interval) {
      // Same comparison with values converted to samples; the units of the
      // published interval table are ambiguous, so both are reported.
      auto to_samples = [fs](std::vector<double> v) {
        for (double& x : v) x *= fs / 1000.0;
        return v;
      };
      rows.push_back({real.schema[k], "samples", divergences(to_samples(xr), to_samples(yr), params)});
    }
  }
  return rows;
}

}  // namespace ecglong
