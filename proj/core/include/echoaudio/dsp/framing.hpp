#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace echoaudio::dsp {

enum class WindowKind { hamming, hanning };

WindowKind parse_window_kind(std::string_view name);
std::string_view to_string(WindowKind kind);

/// Short-time analysis geometry. Lengths are in milliseconds and converted to
/// samples at the clip's rate.
struct FrameConfig {
  double frame_len_ms = 25.0;
  double hop_ms = 10.0;
  WindowKind window = WindowKind::hamming;
  std::size_t n_fft = 1024;
  double pre_emphasis = 0.97;
  bool pre_emphasis_enabled = true;

  std::size_t frame_samples(int sample_rate_hz) const;
  std::size_t hop_samples(int sample_rate_hz) const;

  /// Throws std::invalid_argument if hop/frame/n_fft are inconsistent at this rate.
  void validate(int sample_rate_hz) const;
};

/// floor((len - frame) / hop) + 1, and 1 for clips shorter than one frame.
std::size_t frame_count(std::size_t n_samples, std::size_t frame_len, std::size_t hop);

/// Frame k starts at k * hop; the tail of the last frame is zero-padded.
std::vector<std::vector<double>> frame_signal(std::span<const double> samples, const FrameConfig& cfg,
                                              int sample_rate_hz);

/// w[n] = a - (1 - a) cos(2 pi n / (L - 1)) with a = 0.54 (Hamming) or 0.5 (Hanning).
std::vector<double> window_coefficients(std::size_t length, WindowKind kind);
std::vector<double> apply_window(std::span<const double> frame, WindowKind kind);

/// y[0] = x[0], y[n] = x[n] - coeff * x[n - 1].
std::vector<double> pre_emphasize(std::span<const double> samples, double coeff);

}  // namespace echoaudio::dsp
