#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ecglong {

enum class BeatLabel { Normal, Abnormal };

const char* to_string(BeatLabel label);
BeatLabel beat_label_from_string(const std::string& s);

/// Uniformly sampled single-lead waveform; amplitudes in mV.
struct Signal {
  std::vector<double> samples;
  int fs = 128;
  std::string channel_name = "MLII";

  std::int64_t length() const { return static_cast<std::int64_t>(samples.size()); }
};

/// Fixed-size window around an R-peak: pre_r samples before it, post_r after.
struct BeatWindow {
  int pre_r = 60;
  int post_r = 120;

  int length() const { return pre_r + post_r + 1; }
};

/// One stored beat, waveform centred on its R-peak, plus the cached
/// descriptor values the matcher compares against.
struct BeatRecord {
  std::int64_t id = 0;
  BeatLabel label = BeatLabel::Normal;
  std::vector<double> waveform;
  std::map<std::string, double> descriptors;
};

// Contiguous copy of signal[r_index - pre_r .. r_index + post_r]. The R
// sample lands at position pre_r. Throws out_of_bounds when the window
// does not fit; callers are expected to skip edge beats.
std::vector<double> slice_beat(const Signal& signal, std::int64_t r_index, const BeatWindow& window);

// Mean of the first five and last five samples (all samples when shorter),
// used as the resting-level estimate when filling gaps between beats.
double baseline_of(const std::vector<double>& waveform);

bool all_finite(const std::vector<double>& values);

}  // namespace ecglong
