#include "echoaudio/td/conv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace echoaudio::td {

std::vector<double> convolve(std::span<const double> audio, std::span<const double> filter_signal) {
  if (audio.empty() || filter_signal.empty()) throw std::invalid_argument("convolve: empty input");
  std::vector<double> y(audio.size() + filter_signal.size() - 1, 0.0);
  for (std::size_t m = 0; m < audio.size(); ++m) {
    const double a = audio[m];
    if (a == 0.0) continue;
    double* out = y.data() + m;
    for (std::size_t k = 0; k < filter_signal.size(); ++k) out[k] += a * filter_signal[k];
  }
  return y;
}

std::vector<double> trim(std::span<const double> conv, std::size_t audio_len) {
  if (conv.size() < audio_len) {
    throw std::invalid_argument("trim: convolution of " + std::to_string(conv.size()) +
                                " samples is shorter than the audio (" + std::to_string(audio_len) + ")");
  }
  return {conv.begin(), conv.begin() + static_cast<std::ptrdiff_t>(audio_len)};
}

namespace {

// [begin, end) of window i when L samples are split into n windows.
std::pair<std::size_t, std::size_t> window_span(std::size_t i, std::size_t len, std::size_t n) {
  const std::size_t base = len / n;
  const std::size_t extra = len % n;
  const std::size_t begin = i * base + std::min(i, extra);
  return {begin, begin + base + (i < extra ? 1 : 0)};
}

}  // namespace

std::vector<double> pool_abs_max(std::span<const double> signal, std::size_t n_windows) {
  if (n_windows < 1) throw std::invalid_argument("pool_abs_max: need at least one window");
  if (n_windows > signal.size()) {
    throw std::invalid_argument("pool_abs_max: " + std::to_string(n_windows) + " windows exceed " +
                                std::to_string(signal.size()) + " samples");
  }
  std::vector<double> out(n_windows);
  for (std::size_t i = 0; i < n_windows; ++i) {
    const auto [begin, end] = window_span(i, signal.size(), n_windows);
    double best = signal[begin];
    for (std::size_t k = begin + 1; k < end; ++k) {
      if (std::abs(signal[k]) > std::abs(best)) best = signal[k];
    }
    out[i] = best;
  }
  return out;
}

Eigen::MatrixXd direct_streams(std::span<const double> audio, const TimeDomainFilterbank& tdfb) {
  Eigen::MatrixXd streams(static_cast<Eigen::Index>(tdfb.n_channels()), static_cast<Eigen::Index>(audio.size()));
  for (std::size_t c = 0; c < tdfb.n_channels(); ++c) {
    const auto full = convolve(audio, tdfb.channels[c].signal);
    for (std::size_t n = 0; n < audio.size(); ++n) {
      streams(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(n)) = full[n];
    }
  }
  return streams;
}

dsp::FeatureMatrix pool_streams(const Eigen::MatrixXd& streams, std::size_t n_frames, int sample_rate_hz,
                                const TdFeatureOptions& options) {
  const auto len = static_cast<std::size_t>(streams.cols());
  dsp::FeatureMatrix out;
  out.coeff_kind = dsp::CoeffKind::td_mfcc;
  out.values.resize(streams.rows(), static_cast<Eigen::Index>(n_frames));
  std::vector<double> row(len);
  for (Eigen::Index c = 0; c < streams.rows(); ++c) {
    for (std::size_t n = 0; n < len; ++n) row[n] = streams(c, static_cast<Eigen::Index>(n));
    const auto pooled = pool_abs_max(row, n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
      const double v = options.log_post_map ? std::log10(std::abs(pooled[i]) + 1e-10) : pooled[i];
      out.values(c, static_cast<Eigen::Index>(i)) = v;
    }
  }
  out.frame_times_s.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    out.frame_times_s[i] = static_cast<double>(window_span(i, len, n_frames).first) / sample_rate_hz;
  }
  return out;
}

dsp::FeatureMatrix td_mfcc_from_predictor(const audio::AudioClip& clip, const StreamPredictor& predictor,
                                          std::size_t n_frames, const TdFeatureOptions& options) {
  const Eigen::MatrixXd streams = predictor(clip.samples);
  if (streams.cols() != static_cast<Eigen::Index>(clip.samples.size())) {
    throw std::invalid_argument("td features: predictor returned streams of the wrong length");
  }
  return pool_streams(streams, n_frames, clip.sample_rate_hz, options);
}

dsp::FeatureMatrix td_mfcc_direct(const audio::AudioClip& clip, const TimeDomainFilterbank& tdfb,
                                  std::size_t n_frames, const TdFeatureOptions& options) {
  if (clip.sample_rate_hz != tdfb.sample_rate_hz) {
    throw std::invalid_argument("td_mfcc_direct: clip rate differs from the filterbank rate");
  }
  return pool_streams(direct_streams(clip.samples, tdfb), n_frames, clip.sample_rate_hz, options);
}

}  // namespace echoaudio::td
