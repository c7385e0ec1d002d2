#include "ecglong/delineate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "ecglong/errors.hpp"

namespace ecglong {

namespace {

std::int64_t round_samples(double seconds, int fs) {
  return std::llround(seconds * fs);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Sliding-window maximum over [i - radius, i + radius], O(n) via monotonic deque.
std::vector<double> rolling_max(const std::vector<double>& x, std::int64_t radius) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  std::vector<double> out(x.size());
  std::deque<std::int64_t> q;
  std::int64_t next = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (; next <= std::min(i + radius, n - 1); ++next) {
      while (!q.empty() && x[q.back()] <= x[next]) q.pop_back();
      q.push_back(next);
    }
    while (q.front() < i - radius) q.pop_front();
    out[i] = x[q.front()];
  }
  return out;
}

}  // namespace

std::size_t FeatureTrajectory::feature_index(const std::string& name) const {
  for (std::size_t k = 0; k < schema.size(); ++k)
    if (schema[k] == name) return k;
  fail(Errc::unknown_feature, "feature '" + name + "' not in schema");
}

std::vector<double> FeatureTrajectory::column(std::size_t k) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.values.at(k));
  return out;
}

const std::vector<std::string>& default_schema() {
  static const std::vector<std::string> schema = {"R_Int", "P_Int", "Q_Int", "T_Int",
                                                  "R_Amp", "P_Amp", "Q_Amp", "T_Amp"};
  return schema;
}

bool is_interval_feature(const std::string& name) {
  return name.size() > 4 && name.compare(name.size() - 4, 4, "_Int") == 0;
}

std::vector<double> detection_envelope(const Signal& signal, const DetectorConfig& config) {
  const std::int64_t n = signal.length();
  std::vector<double> sq(signal.samples.size(), 0.0);
  for (std::int64_t i = 1; i + 1 < n; ++i) {
    const double d = 0.5 * (signal.samples[i + 1] - signal.samples[i - 1]);
    sq[i] = d * d;
  }
  const std::int64_t half = std::max<std::int64_t>(1, round_samples(config.integration_window_s / 2.0, signal.fs));
  std::vector<double> env(signal.samples.size(), 0.0);
  double acc = 0.0;
  std::int64_t lo = 0, hi = -1;  // current inclusive window
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t want_lo = std::max<std::int64_t>(0, i - half);
    const std::int64_t want_hi = std::min<std::int64_t>(n - 1, i + half);
    while (hi < want_hi) acc += sq[++hi];
    while (lo < want_lo) acc -= sq[lo++];
    env[i] = acc / static_cast<double>(want_hi - want_lo + 1);
  }
  return env;
}

std::vector<std::int64_t> detect_r_peaks(const Signal& signal, const DetectorConfig& config) {
  const std::int64_t n = signal.length();
  if (signal.fs <= 0) fail(Errc::invalid_config, "detect_r_peaks: fs must be positive");
  if (n < 2 * signal.fs)
    fail(Errc::too_short, "detect_r_peaks: need at least 2 s of signal, got " + std::to_string(n) + " samples");

  const std::vector<double> env = detection_envelope(signal, config);
  const std::int64_t max_radius = std::max<std::int64_t>(1, round_samples(config.envelope_max_window_s / 2.0, signal.fs));
  const std::vector<double> env_max = rolling_max(env, max_radius);
  const std::int64_t refractory = std::max<std::int64_t>(1, round_samples(config.refractory_s, signal.fs));
  const std::int64_t refine_radius = std::max<std::int64_t>(2, round_samples(config.integration_window_s / 2.0, signal.fs));

  // Local envelope maxima above the adaptive threshold. A single
  // above-threshold run can cover several beats at short R-R, so every local
  // peak counts; plateaus contribute their rightmost sample.
  std::vector<std::pair<std::int64_t, double>> env_peaks;  // (index, envelope value)
  for (std::int64_t i = 0; i < n; ++i) {
    if (!(env[i] > config.threshold_fraction * env_max[i])) continue;
    const double prev = i > 0 ? env[i - 1] : -1.0;
    const double next = i + 1 < n ? env[i + 1] : -1.0;
    if (env[i] >= prev && env[i] > next) env_peaks.emplace_back(i, env[i]);
  }

  // Refine each envelope peak to the largest-|amplitude| sample nearby and
  // enforce the refractory period, keeping the stronger envelope on conflict.
  std::vector<std::pair<std::int64_t, double>> kept;  // (r index, envelope strength)
  for (const auto& [peak, strength] : env_peaks) {
    const std::int64_t lo = std::max<std::int64_t>(0, peak - refine_radius);
    const std::int64_t hi = std::min<std::int64_t>(n - 1, peak + refine_radius);
    std::int64_t r = lo;
    for (std::int64_t j = lo + 1; j <= hi; ++j)
      if (std::abs(signal.samples[j]) > std::abs(signal.samples[r])) r = j;
    if (!kept.empty() && r - kept.back().first < refractory) {
      if (strength > kept.back().second) kept.back() = {r, strength};
      continue;
    }
    kept.emplace_back(r, strength);
  }

  std::vector<std::int64_t> r_indices;
  r_indices.reserve(kept.size());
  for (const auto& [r, s] : kept)
    if (r_indices.empty() || r > r_indices.back()) r_indices.push_back(r);
  if (r_indices.empty()) fail(Errc::no_beats_found, "detect_r_peaks: no beats found");

  // Search-back: a gap much longer than the running R-R suggests a low-energy
  // beat lost under the primary threshold; rescan such gaps at half threshold.
  auto refine = [&](std::int64_t peak) {
    const std::int64_t lo = std::max<std::int64_t>(0, peak - refine_radius);
    const std::int64_t hi = std::min<std::int64_t>(n - 1, peak + refine_radius);
    std::int64_t r = lo;
    for (std::int64_t j = lo + 1; j <= hi; ++j)
      if (std::abs(signal.samples[j]) > std::abs(signal.samples[r])) r = j;
    return r;
  };
  for (int round = 0; round < 4 && r_indices.size() >= 2; ++round) {
    std::vector<std::int64_t> gaps(r_indices.size() - 1);
    for (std::size_t k = 0; k + 1 < r_indices.size(); ++k) gaps[k] = r_indices[k + 1] - r_indices[k];
    std::vector<std::int64_t> sorted_gaps(gaps);
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    const double median_rr = static_cast<double>(sorted_gaps[sorted_gaps.size() / 2]);
    bool inserted = false;
    std::vector<std::int64_t> found;
    for (std::size_t k = 0; k + 1 < r_indices.size(); ++k) {
      if (static_cast<double>(gaps[k]) <= 1.66 * median_rr) continue;
      const std::int64_t lo = r_indices[k] + refractory;
      const std::int64_t hi = r_indices[k + 1] - refractory;
      std::int64_t best = -1;
      for (std::int64_t i = std::max<std::int64_t>(1, lo); i <= std::min(hi, n - 2); ++i) {
        if (!(env[i] > 0.5 * config.threshold_fraction * env_max[i])) continue;
        if (env[i] >= env[i - 1] && env[i] > env[i + 1] && (best < 0 || env[i] > env[best])) best = i;
      }
      if (best < 0) continue;
      const std::int64_t r = refine(best);
      if (r >= lo && r <= hi) {
        found.push_back(r);
        inserted = true;
      }
    }
    if (!inserted) break;
    r_indices.insert(r_indices.end(), found.begin(), found.end());
    std::sort(r_indices.begin(), r_indices.end());
    r_indices.erase(std::unique(r_indices.begin(), r_indices.end()), r_indices.end());
  }
  return r_indices;
}

namespace {

// Scan order starts nearest the R so plateau ties resolve toward it.
template <typename Better>
std::optional<std::int64_t> scan_extremum(const Signal& s, std::int64_t from, std::int64_t to, Better better) {
  const std::int64_t lo = std::min(from, to), hi = std::max(from, to);
  if (lo < 0 || hi >= s.length()) return std::nullopt;
  std::int64_t best = from;
  const std::int64_t step = from <= to ? 1 : -1;
  for (std::int64_t j = from; j != to + step; j += step)
    if (better(s.samples[j], s.samples[best])) best = j;
  return best;
}

}  // namespace

FiducialPoints delineate(const Signal& signal, std::int64_t r_index) {
  if (r_index < 0 || r_index >= signal.length()) fail(Errc::out_of_bounds, "delineate: r_index outside signal");
  const auto lower = [](double a, double b) { return a < b; };
  const auto higher = [](double a, double b) { return a > b; };
  const std::int64_t w80 = std::max<std::int64_t>(1, round_samples(0.080, signal.fs));
  const std::int64_t w240 = round_samples(0.240, signal.fs);
  const std::int64_t w360 = round_samples(0.360, signal.fs);

  FiducialPoints f;
  f.r_index = r_index;
  f.r_amp = signal.samples[r_index];
  f.q_index = scan_extremum(signal, r_index - 1, r_index - w80, lower);
  f.s_index = scan_extremum(signal, r_index + 1, r_index + w80, lower);
  f.p_index = scan_extremum(signal, r_index - w80 - 1, r_index - w240, higher);
  f.t_index = scan_extremum(signal, r_index + w80 + 1, r_index + w360, higher);
  if (f.p_index) f.p_amp = signal.samples[*f.p_index];
  if (f.q_index) f.q_amp = signal.samples[*f.q_index];
  if (f.s_index) f.s_amp = signal.samples[*f.s_index];
  if (f.t_index) f.t_amp = signal.samples[*f.t_index];
  return f;
}

FeatureTrajectory extract_features(const Signal& signal, const std::vector<FiducialPoints>& beats,
                                   const std::vector<BeatLabel>& labels, const ExtractionConfig& config) {
  if (beats.empty()) fail(Errc::empty_input, "extract_features: no beats");
  if (labels.size() != beats.size())
    fail(Errc::length_mismatch, "extract_features: labels and beats misaligned");
  for (std::size_t i = 1; i < beats.size(); ++i)
    if (beats[i].r_index <= beats[i - 1].r_index)
      fail(Errc::invalid_config, "extract_features: beats must be sorted by r_index");

  const double mps = 1000.0 / signal.fs;
  const auto& schema = default_schema();
  const std::size_t n = beats.size();
  constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  FeatureTrajectory traj;
  traj.schema = schema;
  traj.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FiducialPoints& b = beats[i];
    auto& v = traj.rows[i].values;
    v.assign(schema.size(), kMissing);
    if (i + 1 < n) v[0] = static_cast<double>(beats[i + 1].r_index - b.r_index) * mps;  // R_Int
    if (b.p_index) v[1] = static_cast<double>(b.r_index - *b.p_index) * mps;            // P_Int
    if (b.q_index) v[2] = static_cast<double>(b.r_index - *b.q_index) * mps;            // Q_Int
    if (b.t_index) v[3] = static_cast<double>(*b.t_index - b.r_index) * mps;            // T_Int
    v[4] = b.r_amp;
    if (b.p_index) v[5] = b.p_amp;
    if (b.q_index) v[6] = b.q_amp;
    if (b.t_index) v[7] = b.t_amp;
    traj.rows[i].label = labels[i];
  }

  // Median imputation per feature; configured defaults when a feature was
  // never observed anywhere in the trajectory.
  const std::vector<double> fallback = {config.default_r_int_ms, config.default_p_int_ms,
                                        config.default_q_int_ms, config.default_t_int_ms,
                                        config.default_amp_mv,   config.default_amp_mv,
                                        config.default_amp_mv,   config.default_amp_mv};
  for (std::size_t k = 0; k < schema.size(); ++k) {
    std::vector<double> observed;
    for (const auto& row : traj.rows)
      if (!std::isnan(row.values[k])) observed.push_back(row.values[k]);
    const double fill = observed.empty() ? fallback[k] : median(std::move(observed));
    for (auto& row : traj.rows)
      if (std::isnan(row.values[k])) row.values[k] = fill;
  }
  return traj;
}

}  // namespace ecglong
