#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "echoaudio/audio/audio_clip.hpp"
#include "echoaudio/dsp/feature_matrix.hpp"
#include "echoaudio/esn/esn.hpp"
#include "echoaudio/esn/readout.hpp"
#include "echoaudio/td/conv.hpp"
#include "echoaudio/td/filterbank.hpp"

namespace echoaudio::td {

enum class ReadoutMode {
  joint,        // one reservoir, one readout row per channel
  per_channel,  // one reservoir + single-row readout per channel (ablation)
};

ReadoutMode parse_readout_mode(std::string_view name);
std::string_view to_string(ReadoutMode mode);

/// A reservoir and the readout rows it serves.
struct ConvMimic {
  esn::Esn esn;
  esn::Readout readout;
  std::vector<int> channels;  // row i of the readout predicts channels[i]
};

/// Reservoir trained to reproduce the trimmed convolution of raw audio with
/// every time-domain channel.
struct ConvFeatureExtractor {
  std::vector<ConvMimic> mimics;
  TimeDomainFilterbank tdfb;
  ReadoutMode mode = ReadoutMode::joint;
  Eigen::Index washout = 50;
  std::vector<double> training_nrmse;  // per channel

  std::size_t n_channels() const { return tdfb.n_channels(); }

  /// Predicted convolution streams, channels x audio.size().
  Eigen::MatrixXd predict_streams(std::span<const double> audio) const;
  StreamPredictor predictor() const;
};

/// Reservoir 1 defaults: 35 nodes, no leak and a small input scale so the
/// reservoir stays close to a linear filter bank.
inline esn::EsnConfig default_mimic_esn() {
  esn::EsnConfig c;
  c.n_nodes = 35;
  c.leak_rate = 1.0;
  c.input_scale = 0.2;
  return c;
}

struct ConvTrainingOptions {
  esn::EsnConfig esn = default_mimic_esn();  // input_dim must be 1
  double ridge_lambda = esn::kDefaultRidgeLambda;
  Eigen::Index washout = 50;
  ReadoutMode mode = ReadoutMode::joint;
};

struct ConvTrainingResult {
  ConvFeatureExtractor extractor;
  std::vector<std::string> warnings;  // skipped clips
};

/// Drives the reservoir with each clip's raw samples from the zero state,
/// drops `washout` steps per clip, and fits one ridge readout against the
/// trimmed direct convolution of the clip with each channel. training_nrmse
/// is measured on the same post-washout steps. Clips no longer than the
/// washout are skipped with a warning; if all are skipped, throws DataError.
/// A constant (e.g. all-zero) target channel raises
/// UndefinedNormalizationError.
ConvTrainingResult train_conv_reservoir(std::span<const audio::AudioClip> clips, const TimeDomainFilterbank& tdfb,
                                        const ConvTrainingOptions& options);

/// Reservoir path of the time-domain features: predicted streams -> pool.
dsp::FeatureMatrix td_mfcc_reservoir(const audio::AudioClip& clip, const ConvFeatureExtractor& extractor,
                                     std::size_t n_frames, const TdFeatureOptions& options = {});

/// Per-channel NRMSE of predicted vs direct streams over the post-washout
/// steps of `clips`, pooled across clips.
std::vector<double> mimicry_nrmse(const ConvFeatureExtractor& extractor, std::span<const audio::AudioClip> clips);

/// EARC block per mimic followed by a "TDFB" block:
///   "EAFX" u32 version u8 mode u32 washout u32 n_mimics
///   per mimic: u32 n_rows, n_rows * u32 channel, EARC block
///   "TDFB" u32 fs u32 signal_len u32 n_channels,
///          per channel u32 n_pairs, n_pairs * (f64 freq, f64 amplitude)
///   u32 n, n * f64 training_nrmse
std::string encode_extractor(const ConvFeatureExtractor& extractor);
ConvFeatureExtractor decode_extractor(std::string_view bytes);

void save_extractor(const std::filesystem::path& path, const ConvFeatureExtractor& extractor);
ConvFeatureExtractor load_extractor(const std::filesystem::path& path);

}  // namespace echoaudio::td
