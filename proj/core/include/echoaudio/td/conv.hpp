#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "echoaudio/audio/audio_clip.hpp"
#include "echoaudio/dsp/feature_matrix.hpp"
#include "echoaudio/td/filterbank.hpp"

namespace echoaudio::td {

/// Full linear convolution by direct summation; length Na + Nf - 1.
std::vector<double> convolve(std::span<const double> audio, std::span<const double> filter_signal);

/// Keeps the first audio_len samples of a convolution.
std::vector<double> trim(std::span<const double> conv, std::size_t audio_len);

/// Splits the signal into n_windows contiguous spans (the first L mod n spans
/// get one extra sample) and keeps each span's largest-magnitude sample with
/// its sign.
std::vector<double> pool_abs_max(std::span<const double> signal, std::size_t n_windows);

struct TdFeatureOptions {
  /// Maps pooled values through log10(|v| + 1e-10). Off reproduces the
  /// plain convolve/trim/pool pipeline.
  bool log_post_map = false;
};

/// Trimmed convolution streams of a clip with every channel: channels x Na.
Eigen::MatrixXd direct_streams(std::span<const double> audio, const TimeDomainFilterbank& tdfb);

/// Pools per-channel streams (channels x L) into a channels x n_frames matrix.
dsp::FeatureMatrix pool_streams(const Eigen::MatrixXd& streams, std::size_t n_frames, int sample_rate_hz,
                                const TdFeatureOptions& options = {});

/// Produces per-channel convolution streams for raw audio. The exact
/// convolution and a trained reservoir are both stream predictors.
using StreamPredictor = std::function<Eigen::MatrixXd(std::span<const double>)>;

/// convolve -> trim -> pool for every channel.
dsp::FeatureMatrix td_mfcc_direct(const audio::AudioClip& clip, const TimeDomainFilterbank& tdfb,
                                  std::size_t n_frames, const TdFeatureOptions& options = {});

/// Same pooling applied to the streams of an arbitrary predictor.
dsp::FeatureMatrix td_mfcc_from_predictor(const audio::AudioClip& clip, const StreamPredictor& predictor,
                                          std::size_t n_frames, const TdFeatureOptions& options = {});

}  // namespace echoaudio::td
