#pragma once

#include <optional>
#include <string>
#include <vector>

namespace echoaudio::audio {

/// Canonical analysis rate; every clip is resampled to this on ingestion.
inline constexpr int kCanonicalRateHz = 8000;

/// Mono speech signal with its labels. Samples lie in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = kCanonicalRateHz;
  std::optional<int> digit_label;
  std::optional<std::string> speaker_label;
  std::string source_path;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

/// Throws std::invalid_argument when the clip breaks the AudioClip invariants.
void validate(const AudioClip& clip);

}  // namespace echoaudio::audio
