#pragma once

#include "echoaudio/audio/audio_clip.hpp"

namespace echoaudio::audio {

/// Windowed-sinc interpolation settings. The kernel is a Kaiser-windowed sinc
/// with `zero_crossings` lobes on each side, measured at the lower of the two
/// rates, so the stopband starts at the output Nyquist when downsampling.
/// Defaults give roughly 80 dB of stopband rejection.
struct ResamplerQuality {
  int zero_crossings = 32;
  double kaiser_beta = 8.6;
  /// Passband edge as a fraction of the lower Nyquist frequency.
  double rolloff = 0.95;
};

/// Band-limited resampling to `target_rate_hz`. Output length is
/// round(n * target / source), so duration is kept within one output sample.
/// Equal rates return the clip unchanged. If interpolation overshoots the
/// [-1, 1] range the result is rescaled by its peak.
AudioClip resample(const AudioClip& clip, int target_rate_hz, const ResamplerQuality& quality = {});

}  // namespace echoaudio::audio
