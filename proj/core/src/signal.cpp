#include "ecglong/signal.hpp"

#include <algorithm>
#include <cmath>

#include "ecglong/errors.hpp"

namespace ecglong {

const char* to_string(BeatLabel label) {
  return label == BeatLabel::Normal ? "Normal" : "Abnormal";
}

BeatLabel beat_label_from_string(const std::string& s) {
  if (s == "Normal") return BeatLabel::Normal;
  if (s == "Abnormal") return BeatLabel::Abnormal;
  fail(Errc::parse_error, "unknown beat label '" + s + "'");
}

std::vector<double> slice_beat(const Signal& signal, std::int64_t r_index, const BeatWindow& window) {
  if (signal.samples.empty()) fail(Errc::empty_input, "slice_beat: empty signal");
  const std::int64_t lo = r_index - window.pre_r;
  const std::int64_t hi = r_index + window.post_r;
  if (lo < 0 || hi >= signal.length())
    fail(Errc::out_of_bounds, "slice_beat: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                  "] exceeds signal of length " + std::to_string(signal.length()));
  return {signal.samples.begin() + lo, signal.samples.begin() + hi + 1};
}

double baseline_of(const std::vector<double>& waveform) {
  if (waveform.empty()) fail(Errc::empty_input, "baseline_of: empty waveform");
  const std::size_t k = std::min<std::size_t>(5, waveform.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += waveform[i];
  for (std::size_t i = waveform.size() - k; i < waveform.size(); ++i) sum += waveform[i];
  return sum / static_cast<double>(2 * k);
}

bool all_finite(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace ecglong
