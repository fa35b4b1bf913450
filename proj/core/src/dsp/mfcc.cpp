#include "echoaudio/dsp/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace echoaudio::dsp {

std::vector<double> power_spectrum(std::span<const Complex> spectrum) {
  const std::size_t n_bins = spectrum.size() / 2 + 1;
  std::vector<double> p(std::min(n_bins, spectrum.size()));
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(spectrum[k]);
  return p;
}

std::vector<double> dct_log(std::span<const double> mel_energies, std::size_t n_coeffs, double floor_value,
                            bool include_c0) {
  const std::size_t m_count = mel_energies.size();
  if (n_coeffs > m_count) {
    throw std::invalid_argument("dct_log: " + std::to_string(n_coeffs) + " coefficients requested from " +
                                std::to_string(m_count) + " mel energies");
  }
  std::vector<double> logs(m_count);
  for (std::size_t m = 0; m < m_count; ++m) logs[m] = std::log10(std::max(mel_energies[m], floor_value));

  const std::size_t first = include_c0 ? 0 : 1;
  const double scale = std::numbers::pi / static_cast<double>(m_count);
  std::vector<double> c(n_coeffs, 0.0);
  for (std::size_t i = 0; i < n_coeffs; ++i) {
    const auto n = static_cast<double>(first + i);
    double acc = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) acc += logs[m] * std::cos(scale * n * (static_cast<double>(m) + 0.5));
    c[i] = acc;
  }
  return c;
}

FeatureMatrix mfcc(const audio::AudioClip& clip, const FrameConfig& frame_cfg, const MelFilterbank& fb,
                   const MfccOptions& options) {
  if (clip.sample_rate_hz != fb.sample_rate_hz) {
    throw std::invalid_argument("mfcc: clip at " + std::to_string(clip.sample_rate_hz) + " Hz, filterbank at " +
                                std::to_string(fb.sample_rate_hz) + " Hz");
  }
  if (frame_cfg.n_fft != fb.n_fft) throw std::invalid_argument("mfcc: frame n_fft differs from filterbank n_fft");
  if (options.n_coeffs > static_cast<std::size_t>(fb.n_filters)) {
    throw std::invalid_argument("mfcc: more coefficients than mel filters");
  }

  const std::vector<double> signal = frame_cfg.pre_emphasis_enabled
                                         ? pre_emphasize(clip.samples, frame_cfg.pre_emphasis)
                                         : clip.samples;
  const auto frames = frame_signal(signal, frame_cfg, clip.sample_rate_hz);
  const auto window = window_coefficients(frames.front().size(), frame_cfg.window);
  const double hop_s = static_cast<double>(frame_cfg.hop_samples(clip.sample_rate_hz)) / clip.sample_rate_hz;

  FeatureMatrix out;
  out.coeff_kind = CoeffKind::mfcc;
  out.values.resize(static_cast<Eigen::Index>(options.n_coeffs), static_cast<Eigen::Index>(frames.size()));
  out.frame_times_s.resize(frames.size());

  std::vector<double> windowed(frames.front().size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t n = 0; n < windowed.size(); ++n) windowed[n] = frames[t][n] * window[n];
    const auto spectrum = dft(windowed, fb.n_fft);
    const auto energies = apply_filterbank(power_spectrum(spectrum), fb);
    const auto c = dct_log(energies, options.n_coeffs, options.log_floor, options.include_c0);
    for (std::size_t i = 0; i < c.size(); ++i) out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = c[i];
    out.frame_times_s[t] = static_cast<double>(t) * hop_s;
  }
  return out;
}

FeatureMatrix delta(const FeatureMatrix& features, int n) {
  if (n < 1) throw std::invalid_argument("delta: window n must be >= 1");
  const Eigen::Index frames = features.n_frames();
  if (frames < 2 * n + 1) {
    throw std::invalid_argument("delta: need at least " + std::to_string(2 * n + 1) + " frames, got " +
                                std::to_string(frames));
  }
  double denom = 0.0;
  for (int k = 1; k <= n; ++k) denom += static_cast<double>(k * k);
  denom *= 2.0;

  FeatureMatrix out;
  out.coeff_kind = CoeffKind::delta;
  out.frame_times_s = features.frame_times_s;
  out.values.resize(features.n_coeffs(), frames);
  auto at = [&](Eigen::Index row, Eigen::Index t) {
    return features.values(row, std::clamp<Eigen::Index>(t, 0, frames - 1));
  };
  for (Eigen::Index r = 0; r < features.n_coeffs(); ++r) {
    for (Eigen::Index t = 0; t < frames; ++t) {
      double acc = 0.0;
      for (int k = 1; k <= n; ++k) acc += k * (at(r, t + k) - at(r, t - k));
      out.values(r, t) = acc / denom;
    }
  }
  return out;
}

}  // namespace echoaudio::dsp
