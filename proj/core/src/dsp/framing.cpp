#include "echoaudio/dsp/framing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "echoaudio/dsp/fft.hpp"

namespace echoaudio::dsp {

WindowKind parse_window_kind(std::string_view name) {
  if (name == "hamming") return WindowKind::hamming;
  if (name == "hanning" || name == "hann") return WindowKind::hanning;
  throw std::invalid_argument("unknown window '" + std::string(name) + "'");
}

std::string_view to_string(WindowKind kind) { return kind == WindowKind::hamming ? "hamming" : "hanning"; }

std::size_t FrameConfig::frame_samples(int sample_rate_hz) const {
  return static_cast<std::size_t>(std::llround(frame_len_ms * sample_rate_hz / 1000.0));
}

std::size_t FrameConfig::hop_samples(int sample_rate_hz) const {
  return static_cast<std::size_t>(std::llround(hop_ms * sample_rate_hz / 1000.0));
}

void FrameConfig::validate(int sample_rate_hz) const {
  if (sample_rate_hz <= 0) throw std::invalid_argument("FrameConfig: sample rate must be > 0");
  if (!(hop_ms > 0.0) || hop_ms > frame_len_ms) {
    throw std::invalid_argument("FrameConfig: need 0 < hop_ms <= frame_len_ms");
  }
  const auto frame = frame_samples(sample_rate_hz);
  if (frame < 2 || hop_samples(sample_rate_hz) < 1) {
    throw std::invalid_argument("FrameConfig: frame shorter than two samples at this rate");
  }
  if (!is_power_of_two(n_fft)) throw std::invalid_argument("FrameConfig: n_fft must be a power of two");
  if (n_fft < frame) {
    throw std::invalid_argument("FrameConfig: n_fft " + std::to_string(n_fft) + " smaller than frame of " +
                                std::to_string(frame) + " samples");
  }
  if (pre_emphasis < 0.0 || pre_emphasis >= 1.0) {
    throw std::invalid_argument("FrameConfig: pre_emphasis must lie in [0, 1)");
  }
}

std::size_t frame_count(std::size_t n_samples, std::size_t frame_len, std::size_t hop) {
  if (hop == 0) throw std::invalid_argument("frame_count: hop must be > 0");
  if (n_samples <= frame_len) return 1;
  return (n_samples - frame_len) / hop + 1;
}

std::vector<std::vector<double>> frame_signal(std::span<const double> samples, const FrameConfig& cfg,
                                              int sample_rate_hz) {
  if (samples.empty()) throw std::invalid_argument("frame_signal: empty signal");
  cfg.validate(sample_rate_hz);
  const std::size_t len = cfg.frame_samples(sample_rate_hz);
  const std::size_t hop = cfg.hop_samples(sample_rate_hz);
  const std::size_t n = frame_count(samples.size(), len, hop);

  std::vector<std::vector<double>> frames(n, std::vector<double>(len, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t start = k * hop;
    const std::size_t stop = std::min(samples.size(), start + len);
    std::copy(samples.begin() + static_cast<std::ptrdiff_t>(start),
              samples.begin() + static_cast<std::ptrdiff_t>(stop), frames[k].begin());
  }
  return frames;
}

std::vector<double> window_coefficients(std::size_t length, WindowKind kind) {
  if (length < 2) throw std::invalid_argument("window: length must be >= 2");
  const double a = kind == WindowKind::hamming ? 0.54 : 0.5;
  std::vector<double> w(length);
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = a - (1.0 - a) * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
  }
  return w;
}

std::vector<double> apply_window(std::span<const double> frame, WindowKind kind) {
  const auto w = window_coefficients(frame.size(), kind);
  std::vector<double> out(frame.size());
  for (std::size_t n = 0; n < frame.size(); ++n) out[n] = frame[n] * w[n];
  return out;
}

std::vector<double> pre_emphasize(std::span<const double> samples, double coeff) {
  std::vector<double> out(samples.size());
  if (samples.empty()) return out;
  out[0] = samples[0];
  for (std::size_t n = 1; n < samples.size(); ++n) out[n] = samples[n] - coeff * samples[n - 1];
  return out;
}

}  // namespace echoaudio::dsp
