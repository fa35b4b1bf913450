#include "echoaudio/td/conv_reservoir.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "../binary_io.hpp"
#include "echoaudio/error.hpp"
#include "echoaudio/esn/persistence.hpp"
#include "echoaudio/esn/random.hpp"

namespace echoaudio::td {

ReadoutMode parse_readout_mode(std::string_view name) {
  if (name == "joint") return ReadoutMode::joint;
  if (name == "per_channel") return ReadoutMode::per_channel;
  throw std::invalid_argument("unknown readout mode '" + std::string(name) + "' (expected joint or per_channel)");
}

std::string_view to_string(ReadoutMode mode) { return mode == ReadoutMode::joint ? "joint" : "per_channel"; }

namespace {

Eigen::MatrixXd as_input_row(std::span<const double> audio) {
  return Eigen::Map<const Eigen::RowVectorXd>(audio.data(), static_cast<Eigen::Index>(audio.size()));
}

// Collects per-channel (prediction, target) samples so the NRMSE is pooled
// over every clip rather than averaged per clip.
struct PooledError {
  std::vector<std::vector<double>> pred, target;

  explicit PooledError(std::size_t channels) : pred(channels), target(channels) {}

  void add(const Eigen::MatrixXd& p, const Eigen::MatrixXd& t, Eigen::Index from) {
    for (Eigen::Index c = 0; c < p.rows(); ++c) {
      auto& pc = pred[static_cast<std::size_t>(c)];
      auto& tc = target[static_cast<std::size_t>(c)];
      for (Eigen::Index k = from; k < p.cols(); ++k) {
        pc.push_back(p(c, k));
        tc.push_back(t(c, k));
      }
    }
  }

  std::vector<double> finish() const {
    std::vector<double> out(pred.size());
    for (std::size_t c = 0; c < pred.size(); ++c) {
      try {
        out[c] = esn::nrmse(pred[c], target[c]);
      } catch (const UndefinedNormalizationError&) {
        throw UndefinedNormalizationError("time-domain channel " + std::to_string(c) +
                                          " has a constant convolution target; NRMSE undefined");
      }
    }
    return out;
  }
};

}  // namespace

Eigen::MatrixXd ConvFeatureExtractor::predict_streams(std::span<const double> audio) const {
  if (audio.empty()) throw std::invalid_argument("predict_streams: empty audio");
  const Eigen::MatrixXd input = as_input_row(audio);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n_channels()), input.cols());
  for (const auto& mimic : mimics) {
    const auto traj = esn::run(mimic.esn, input, {}, 0);
    const Eigen::MatrixXd y = esn::apply_readout(mimic.readout, traj.states);
    for (std::size_t r = 0; r < mimic.channels.size(); ++r) out.row(mimic.channels[r]) = y.row(static_cast<Eigen::Index>(r));
  }
  return out;
}

StreamPredictor ConvFeatureExtractor::predictor() const {
  return [this](std::span<const double> audio) { return predict_streams(audio); };
}

ConvTrainingResult train_conv_reservoir(std::span<const audio::AudioClip> clips, const TimeDomainFilterbank& tdfb,
                                        const ConvTrainingOptions& options) {
  if (clips.empty()) throw EmptyDatasetError("train_conv_reservoir: no training clips");
  if (tdfb.n_channels() == 0) throw std::invalid_argument("train_conv_reservoir: filterbank has no channels");
  if (options.esn.input_dim != 1) throw std::invalid_argument("train_conv_reservoir: input_dim must be 1");
  if (options.washout < 0) throw std::invalid_argument("train_conv_reservoir: washout must be >= 0");

  const auto n_ch = static_cast<int>(tdfb.n_channels());
  ConvTrainingResult result;
  auto& ex = result.extractor;
  ex.tdfb = tdfb;
  ex.mode = options.mode;
  ex.washout = options.washout;

  if (options.mode == ReadoutMode::joint) {
    ConvMimic m;
    m.esn = esn::init_reservoir(options.esn);
    for (int c = 0; c < n_ch; ++c) m.channels.push_back(c);
    ex.mimics.push_back(std::move(m));
  } else {
    for (int c = 0; c < n_ch; ++c) {
      auto cfg = options.esn;
      cfg.seed = esn::derive_seed(options.esn.seed, static_cast<std::uint64_t>(c));
      ConvMimic m;
      m.esn = esn::init_reservoir(cfg);
      m.channels = {c};
      ex.mimics.push_back(std::move(m));
    }
  }

  std::vector<const audio::AudioClip*> used;
  for (const auto& clip : clips) {
    if (clip.sample_rate_hz != tdfb.sample_rate_hz) {
      throw std::invalid_argument("train_conv_reservoir: clip " + clip.source_path + " is not at " +
                                  std::to_string(tdfb.sample_rate_hz) + " Hz");
    }
    if (static_cast<Eigen::Index>(clip.samples.size()) <= options.washout) {
      result.warnings.push_back("skipped " + (clip.source_path.empty() ? std::string("<clip>") : clip.source_path) +
                                ": " + std::to_string(clip.samples.size()) + " samples do not exceed washout " +
                                std::to_string(options.washout));
      continue;
    }
    used.push_back(&clip);
  }
  if (used.empty()) throw DataError("train_conv_reservoir: every clip is shorter than the washout");

  const Eigen::Index w = options.washout;
  for (auto& mimic : ex.mimics) {
    esn::RidgeAccumulator acc(mimic.esn.n_nodes(), static_cast<Eigen::Index>(mimic.channels.size()));
    for (const auto* clip : used) {
      const auto traj = esn::run(mimic.esn, as_input_row(clip->samples), {}, w);
      const Eigen::MatrixXd target = direct_streams(clip->samples, tdfb);
      Eigen::MatrixXd t(static_cast<Eigen::Index>(mimic.channels.size()), target.cols());
      for (std::size_t r = 0; r < mimic.channels.size(); ++r) t.row(static_cast<Eigen::Index>(r)) = target.row(mimic.channels[r]);
      acc.add(traj.usable(), t.rightCols(t.cols() - w));
    }
    mimic.readout = acc.solve(options.ridge_lambda);
  }

  PooledError err(tdfb.n_channels());
  for (const auto* clip : used) {
    err.add(ex.predict_streams(clip->samples), direct_streams(clip->samples, tdfb), w);
  }
  ex.training_nrmse = err.finish();
  return result;
}

dsp::FeatureMatrix td_mfcc_reservoir(const audio::AudioClip& clip, const ConvFeatureExtractor& extractor,
                                     std::size_t n_frames, const TdFeatureOptions& options) {
  if (clip.sample_rate_hz != extractor.tdfb.sample_rate_hz) {
    throw std::invalid_argument("td_mfcc_reservoir: clip rate differs from the extractor rate");
  }
  return td_mfcc_from_predictor(clip, extractor.predictor(), n_frames, options);
}

std::vector<double> mimicry_nrmse(const ConvFeatureExtractor& extractor, std::span<const audio::AudioClip> clips) {
  PooledError err(extractor.n_channels());
  bool any = false;
  for (const auto& clip : clips) {
    if (static_cast<Eigen::Index>(clip.samples.size()) <= extractor.washout) continue;
    err.add(extractor.predict_streams(clip.samples), direct_streams(clip.samples, extractor.tdfb), extractor.washout);
    any = true;
  }
  if (!any) throw DataError("mimicry_nrmse: no clip longer than the washout");
  return err.finish();
}

namespace {
constexpr std::uint32_t kEafxVersion = 1;
}

std::string encode_extractor(const ConvFeatureExtractor& extractor) {
  detail::ByteWriter w;
  w.tag("EAFX");
  w.u32(kEafxVersion);
  w.u8(extractor.mode == ReadoutMode::joint ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(extractor.washout));
  w.u32(static_cast<std::uint32_t>(extractor.mimics.size()));
  std::string out = w.take();
  for (const auto& m : extractor.mimics) {
    detail::ByteWriter h;
    h.u32(static_cast<std::uint32_t>(m.channels.size()));
    for (int c : m.channels) h.u32(static_cast<std::uint32_t>(c));
    out += h.take();
    out += esn::encode_earc(m.esn, &m.readout);
  }
  detail::ByteWriter t;
  const auto& fb = extractor.tdfb;
  t.tag("TDFB");
  t.u32(static_cast<std::uint32_t>(fb.sample_rate_hz));
  t.u32(static_cast<std::uint32_t>(fb.signal_len));
  t.u32(static_cast<std::uint32_t>(fb.n_channels()));
  for (const auto& ch : fb.channels) {
    t.u32(static_cast<std::uint32_t>(ch.pairs.size()));
    for (const auto& p : ch.pairs) {
      t.f64(p.freq_hz);
      t.f64(p.amplitude);
    }
  }
  t.u32(static_cast<std::uint32_t>(extractor.training_nrmse.size()));
  for (double v : extractor.training_nrmse) t.f64(v);
  return out + t.take();
}

ConvFeatureExtractor decode_extractor(std::string_view bytes) {
  detail::ByteReader r(bytes);
  r.expect_tag("EAFX", "extractor container");
  const auto version = r.u32();
  if (version != kEafxVersion) {
    throw UnsupportedFormatError("extractor container: version " + std::to_string(version) + " not supported");
  }
  ConvFeatureExtractor ex;
  const auto mode = r.u8();
  if (mode > 1) throw FormatError("extractor container: unknown readout mode");
  ex.mode = mode == 0 ? ReadoutMode::joint : ReadoutMode::per_channel;
  ex.washout = r.u32();
  const auto n_mimics = r.u32();

  std::size_t offset = bytes.size() - r.remaining();
  for (std::uint32_t i = 0; i < n_mimics; ++i) {
    detail::ByteReader h(bytes.substr(offset));
    const auto rows = h.u32();
    ConvMimic m;
    for (std::uint32_t k = 0; k < rows; ++k) m.channels.push_back(static_cast<int>(h.u32()));
    offset += 4 + 4 * static_cast<std::size_t>(rows);
    auto dec = esn::decode_earc(bytes.substr(offset));
    offset += dec.bytes_consumed;
    if (!dec.readout || dec.readout->n_outputs() != static_cast<Eigen::Index>(rows)) {
      throw FormatError("extractor container: readout rows differ from the channel list");
    }
    m.esn = std::move(dec.esn);
    m.readout = std::move(*dec.readout);
    ex.mimics.push_back(std::move(m));
  }

  detail::ByteReader t(bytes.substr(offset));
  t.expect_tag("TDFB", "extractor filterbank block");
  const auto fs = static_cast<int>(t.u32());
  const auto len = static_cast<std::size_t>(t.u32());
  const auto n_ch = t.u32();
  std::vector<std::vector<FilterPair>> pairs(n_ch);
  for (auto& ch : pairs) {
    const auto n = t.u32();
    for (std::uint32_t k = 0; k < n; ++k) {
      const double f = t.f64();
      ch.push_back({f, t.f64()});
    }
  }
  ex.tdfb = make_td_filterbank(std::move(pairs), fs, len);
  const auto n_err = t.u32();
  for (std::uint32_t k = 0; k < n_err; ++k) ex.training_nrmse.push_back(t.f64());
  if (!t.at_end()) throw FormatError("extractor container: trailing bytes");

  for (const auto& m : ex.mimics) {
    for (int c : m.channels) {
      if (c < 0 || c >= static_cast<int>(n_ch)) throw FormatError("extractor container: channel index out of range");
    }
  }
  return ex;
}

void save_extractor(const std::filesystem::path& path, const ConvFeatureExtractor& extractor) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("extractor: cannot write " + path.string());
  const auto bytes = encode_extractor(extractor);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ConvFeatureExtractor load_extractor(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("extractor: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return decode_extractor(ss.str());
}

}  // namespace echoaudio::td
