#include "ecglong/beat_synth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ecglong/errors.hpp"

namespace ecglong {

namespace {

std::vector<double> padded_beat_signal(const std::vector<double>& waveform, int fs, std::int64_t* anchor_out,
                                       const BeatWindow& window) {
  // Pad one second of baseline on each side so the detector precondition and
  // every delineation window fit regardless of the beat window size.
  const double base = baseline_of(waveform);
  const std::size_t pad = static_cast<std::size_t>(fs);
  std::vector<double> s(pad, base);
  s.insert(s.end(), waveform.begin(), waveform.end());
  s.insert(s.end(), pad, base);
  *anchor_out = static_cast<std::int64_t>(pad) + window.pre_r;
  return s;
}

std::size_t abs_argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  return best;
}

}  // namespace

std::map<std::string, double> beat_descriptors(const std::vector<double>& waveform, BeatLabel label,
                                               const BeatSynthConfig& config) {
  std::int64_t anchor = 0;
  Signal s;
  s.fs = config.fs;
  s.samples = padded_beat_signal(waveform, config.fs, &anchor, config.window);
  const FiducialPoints f = delineate(s, anchor);
  const FeatureTrajectory traj = extract_features(s, {f}, {label}, config.extraction);
  std::map<std::string, double> out;
  for (std::size_t k = 0; k < traj.schema.size(); ++k) out[traj.schema[k]] = traj.rows[0].values[k];
  return out;
}

BeatTemplateModel fit_template(const std::vector<std::vector<double>>& beats, BeatLabel label, int k,
                               const BeatSynthConfig& config) {
  if (k < 0 || k > 10) fail(Errc::invalid_config, "fit_template: k must be in [0, 10]");
  const std::size_t needed = std::max<std::size_t>(20, static_cast<std::size_t>(k) + 1);
  if (beats.size() < needed)
    fail(Errc::insufficient_beats,
         "fit_template: need at least " + std::to_string(needed) + " beats, got " + std::to_string(beats.size()));
  const std::size_t w = beats.front().size();
  if (w == 0) fail(Errc::empty_input, "fit_template: zero-length beats");
  for (const auto& b : beats)
    if (b.size() != w) fail(Errc::length_mismatch, "fit_template: beats differ in length");

  const std::size_t n = beats.size();
  Eigen::MatrixXd x(n, w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < w; ++t) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = beats[i][t];
  const Eigen::VectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);

  BeatTemplateModel model;
  model.label = label;
  model.config = config;
  model.mean_beat.assign(mean.data(), mean.data() + w);
  for (int c = 0; c < k; ++c) {
    const Eigen::Index idx = static_cast<Eigen::Index>(w) - 1 - c;  // eigenvalues ascend
    Eigen::VectorXd component = es.eigenvectors().col(idx);
    // Deterministic sign: largest-magnitude entry is positive.
    Eigen::Index peak;
    component.cwiseAbs().maxCoeff(&peak);
    if (component[peak] < 0.0) component = -component;
    model.principal_components.emplace_back(component.data(), component.data() + w);
    model.component_scales.push_back(std::sqrt(std::max(es.eigenvalues()[idx], 0.0)));
  }
  return model;
}

namespace {

std::vector<double> perturb_once(const BeatTemplateModel& model, RandomSource& rng) {
  const auto& cfg = model.config;
  const std::size_t w = model.mean_beat.size();
  std::vector<double> v = model.mean_beat;
  for (std::size_t c = 0; c < model.principal_components.size(); ++c) {
    const double coeff = model.component_scales[c] * rng.normal();
    const auto& comp = model.principal_components[c];
    for (std::size_t t = 0; t < w; ++t) v[t] += coeff * comp[t];
  }

  const double gain = cfg.amplitude_jitter_lo + rng.uniform() * (cfg.amplitude_jitter_hi - cfg.amplitude_jitter_lo);
  for (double& s : v) s *= gain;

  // Bounded global warp anchored at the R sample: displacement grows linearly
  // away from the anchor and never exceeds time_warp_max samples.
  const double warp = -cfg.time_warp_max + rng.uniform() * 2.0 * cfg.time_warp_max;
  const double anchor = static_cast<double>(cfg.window.pre_r);
  const double rate = warp / static_cast<double>(std::max(cfg.window.pre_r, cfg.window.post_r));
  std::vector<double> warped(w);
  for (std::size_t t = 0; t < w; ++t) {
    const double src = anchor + (static_cast<double>(t) - anchor) * (1.0 + rate);
    const double clamped = std::clamp(src, 0.0, static_cast<double>(w - 1));
    const std::size_t i0 = static_cast<std::size_t>(clamped);
    const std::size_t i1 = std::min(i0 + 1, w - 1);
    const double frac = clamped - static_cast<double>(i0);
    warped[t] = (1.0 - frac) * v[i0] + frac * v[i1];
  }

  // Re-anchor so the waveform extremum sits exactly at pre_r.
  const std::int64_t shift = static_cast<std::int64_t>(abs_argmax(warped)) - cfg.window.pre_r;
  if (shift == 0) return warped;
  const double base = baseline_of(warped);
  std::vector<double> out(w, base);
  for (std::size_t t = 0; t < w; ++t) {
    const std::int64_t src = static_cast<std::int64_t>(t) + shift;
    if (src >= 0 && src < static_cast<std::int64_t>(w)) out[t] = warped[static_cast<std::size_t>(src)];
  }
  return out;
}

bool r_detectable(const std::vector<double>& waveform, const BeatSynthConfig& cfg) {
  std::int64_t anchor = 0;
  Signal s;
  s.fs = cfg.fs;
  s.samples = padded_beat_signal(waveform, cfg.fs, &anchor, cfg.window);
  try {
    for (std::int64_t r : detect_r_peaks(s))
      if (std::llabs(r - anchor) <= 5) return true;
  } catch (const Error&) {
    return false;
  }
  return false;
}

}  // namespace

std::vector<BeatRecord> generate_beats(const BeatTemplateModel& model, std::size_t count,
                                       RandomSource& rng, std::int64_t first_id) {
  if (count == 0) fail(Errc::empty_input, "generate_beats: count must be >= 1");
  if (model.mean_beat.size() != static_cast<std::size_t>(model.config.window.length()))
    fail(Errc::length_mismatch, "generate_beats: mean beat does not match the configured window");

  std::vector<BeatRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RandomSource child = rng.fork(i);
    std::vector<double> waveform;
    bool ok = false;
    for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
      waveform = perturb_once(model, child);
      ok = r_detectable(waveform, model.config);
    }
    if (!ok)
      fail(Errc::no_beats_found, "generate_beats: template produces undetectable beats (index " +
                                     std::to_string(i) + ")");
    BeatRecord rec;
    rec.id = first_id + static_cast<std::int64_t>(i);
    rec.label = model.label;
    rec.waveform = std::move(waveform);
    rec.descriptors = beat_descriptors(rec.waveform, model.label, model.config);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<double> analytic_template(const BeatWindow& window, int fs, BeatLabel label) {
  struct Bump {
    double offset_s, amp_mv, sigma_s;
  };
  // Gaussian bump layouts, offsets relative to the R sample.
  static const Bump normal[] = {
      {-0.180, 0.12, 0.030},  // P
      {-0.039, -0.12, 0.012}, // Q
      {0.000, 1.00, 0.012},   // R
      {0.039, -0.20, 0.012},  // S
      {0.242, 0.28, 0.050},   // T
  };
  static const Bump abnormal[] = {
      {-0.050, -0.14, 0.020}, // Q, no P wave
      {0.000, 1.15, 0.013},   // tall R
      {0.045, -0.40, 0.016},  // deep S
      {0.280, 0.16, 0.060},   // late flat T
  };
  const Bump* bumps = label == BeatLabel::Normal ? normal : abnormal;
  const std::size_t n_bumps = label == BeatLabel::Normal ? 5 : 4;

  std::vector<double> beat(static_cast<std::size_t>(window.length()), 0.0);
  for (std::size_t t = 0; t < beat.size(); ++t) {
    const double dt = static_cast<double>(static_cast<int>(t) - window.pre_r) / fs;
    for (std::size_t b = 0; b < n_bumps; ++b) {
      const double z = (dt - bumps[b].offset_s) / bumps[b].sigma_s;
      beat[t] += bumps[b].amp_mv * std::exp(-0.5 * z * z);
    }
  }
  return beat;
}

}  // namespace ecglong
