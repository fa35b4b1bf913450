#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "echoaudio/audio/audio_clip.hpp"
#include "echoaudio/dsp/fft.hpp"
#include "echoaudio/dsp/feature_matrix.hpp"
#include "echoaudio/dsp/framing.hpp"
#include "echoaudio/dsp/mel.hpp"

namespace echoaudio::dsp {

inline constexpr double kLogFloor = 1e-10;

/// |X(k)|^2 for k = 0 .. N/2.
std::vector<double> power_spectrum(std::span<const Complex> spectrum);

/// Cepstra of log10 mel energies:
///   c(n) = sum_{m=0}^{M-1} log10(max(s(m), floor)) cos(pi n (m + 0.5) / M)
/// for n = first .. first + n_coeffs - 1, where first is 0 when `include_c0`
/// and 1 otherwise. Throws std::invalid_argument if n_coeffs > M.
std::vector<double> dct_log(std::span<const double> mel_energies, std::size_t n_coeffs,
                            double floor_value = kLogFloor, bool include_c0 = false);

struct MfccOptions {
  std::size_t n_coeffs = 14;
  double log_floor = kLogFloor;
  bool include_c0 = false;
};

/// Frame -> window -> FFT -> power -> mel -> log/DCT for every frame.
/// The clip must already be at fb.sample_rate_hz.
FeatureMatrix mfcc(const audio::AudioClip& clip, const FrameConfig& frame_cfg, const MelFilterbank& fb,
                   const MfccOptions& options = {});

/// Regression deltas over +/- n frames with edge replication:
///   d_t = sum_k k (c_{t+k} - c_{t-k}) / (2 sum_k k^2).
/// Requires at least 2n + 1 frames.
FeatureMatrix delta(const FeatureMatrix& features, int n = 2);

}  // namespace echoaudio::dsp
