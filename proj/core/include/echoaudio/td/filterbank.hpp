#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "echoaudio/dsp/mel.hpp"

namespace echoaudio::td {

/// One sinusoid of a time-domain mel channel.
struct FilterPair {
  double freq_hz = 0.0;
  double amplitude = 0.0;

  friend bool operator==(const FilterPair&, const FilterPair&) = default;
};

struct TdChannel {
  std::vector<FilterPair> pairs;
  std::vector<double> signal;  // sum of the pair sinusoids, zero phase
};

/// Per-channel sinusoid-sum kernels that stand in for the frequency-domain
/// triangles. Immutable after construction.
struct TimeDomainFilterbank {
  std::vector<TdChannel> channels;
  int sample_rate_hz = 8000;
  std::size_t signal_len = 200;

  std::size_t n_channels() const { return channels.size(); }
};

/// Channel -> replacement pairs, e.g. from a `channel,freq_hz,amplitude` CSV.
using PairOverrides = std::map<int, std::vector<FilterPair>>;

/// One pair per FFT bin where the triangle of `channel` is nonzero:
/// freq = bin * fs / n_fft, amplitude = weight / (sum of the channel's
/// weights). Sorted by frequency. Throws DegenerateFilterError when fewer
/// than two bins are nonzero.
std::vector<FilterPair> derive_filter_pairs(const dsp::MelFilterbank& fb, int channel);

/// s[n] = sum_k A_k sin(2 pi f_k n / fs), n = 0 .. n_samples - 1.
std::vector<double> synth_filter_signal(std::span<const FilterPair> pairs, std::size_t n_samples,
                                        int sample_rate_hz);

/// Builds every channel of `fb`, applying `overrides` where given.
TimeDomainFilterbank make_td_filterbank(const dsp::MelFilterbank& fb, std::size_t signal_len,
                                        const PairOverrides& overrides = {});

/// Rebuilds the signals of an existing set of pairs (used on load).
TimeDomainFilterbank make_td_filterbank(std::vector<std::vector<FilterPair>> channel_pairs, int sample_rate_hz,
                                        std::size_t signal_len);

/// Parses `channel,freq_hz,amplitude` (header required, 0-based channels).
PairOverrides parse_pair_overrides(std::string_view csv);
PairOverrides load_pair_overrides(const std::filesystem::path& path);

}  // namespace echoaudio::td
