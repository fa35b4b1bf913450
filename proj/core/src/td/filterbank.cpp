#include "echoaudio/td/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "echoaudio/error.hpp"

namespace echoaudio::td {

std::vector<FilterPair> derive_filter_pairs(const dsp::MelFilterbank& fb, int channel) {
  if (channel < 0 || channel >= fb.n_filters) {
    throw std::invalid_argument("derive_filter_pairs: channel " + std::to_string(channel) + " out of range");
  }
  const auto row = fb.weights.row(channel);
  const double total = row.sum();
  std::vector<FilterPair> pairs;
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    if (row(k) > 0.0) pairs.push_back({fb.bin_hz(static_cast<std::size_t>(k)), row(k) / total});
  }
  if (pairs.size() < 2) {
    throw DegenerateFilterError("derive_filter_pairs: channel " + std::to_string(channel) +
                                    " has fewer than two nonzero bins",
                                channel);
  }
  return pairs;
}

std::vector<double> synth_filter_signal(std::span<const FilterPair> pairs, std::size_t n_samples,
                                        int sample_rate_hz) {
  if (n_samples < 1) throw std::invalid_argument("synth_filter_signal: n_samples must be >= 1");
  if (sample_rate_hz <= 0) throw std::invalid_argument("synth_filter_signal: sample rate must be > 0");
  std::vector<double> s(n_samples, 0.0);
  for (const auto& p : pairs) {
    const double w = 2.0 * std::numbers::pi * p.freq_hz / sample_rate_hz;
    for (std::size_t n = 0; n < n_samples; ++n) s[n] += p.amplitude * std::sin(w * static_cast<double>(n));
  }
  return s;
}

namespace {

void check_pairs(const std::vector<FilterPair>& pairs, std::size_t channel) {
  for (const auto& p : pairs) {
    if (!(p.freq_hz > 0.0) || !(p.amplitude > 0.0)) {
      throw std::invalid_argument("time-domain filterbank: channel " + std::to_string(channel) +
                                  " has a non-positive frequency or amplitude");
    }
  }
}

}  // namespace

TimeDomainFilterbank make_td_filterbank(std::vector<std::vector<FilterPair>> channel_pairs, int sample_rate_hz,
                                        std::size_t signal_len) {
  TimeDomainFilterbank tdfb;
  tdfb.sample_rate_hz = sample_rate_hz;
  tdfb.signal_len = signal_len;
  tdfb.channels.reserve(channel_pairs.size());
  for (std::size_t c = 0; c < channel_pairs.size(); ++c) {
    check_pairs(channel_pairs[c], c);
    TdChannel ch;
    ch.signal = synth_filter_signal(channel_pairs[c], signal_len, sample_rate_hz);
    ch.pairs = std::move(channel_pairs[c]);
    tdfb.channels.push_back(std::move(ch));
  }
  return tdfb;
}

TimeDomainFilterbank make_td_filterbank(const dsp::MelFilterbank& fb, std::size_t signal_len,
                                        const PairOverrides& overrides) {
  for (const auto& [channel, pairs] : overrides) {
    if (channel < 0 || channel >= fb.n_filters) {
      throw std::invalid_argument("pair override for channel " + std::to_string(channel) +
                                  " outside the filterbank");
    }
  }
  std::vector<std::vector<FilterPair>> all;
  for (int c = 0; c < fb.n_filters; ++c) {
    const auto it = overrides.find(c);
    all.push_back(it != overrides.end() ? it->second : derive_filter_pairs(fb, c));
  }
  return make_td_filterbank(std::move(all), fb.sample_rate_hz, signal_len);
}

PairOverrides parse_pair_overrides(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw DataError("pair overrides: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "channel,freq_hz,amplitude") {
    throw DataError("pair overrides: expected header 'channel,freq_hz,amplitude'");
  }
  PairOverrides out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
      throw DataError("pair overrides: line " + std::to_string(line_no) + " needs three fields");
    }
    try {
      const FilterPair p{std::stod(b), std::stod(c)};
      if (!(p.freq_hz > 0.0) || !(p.amplitude > 0.0)) throw std::invalid_argument("non-positive");
      out[std::stoi(a)].push_back(p);
    } catch (const std::exception&) {
      throw DataError("pair overrides: bad value on line " + std::to_string(line_no));
    }
  }
  for (auto& [ch, pairs] : out) {
    std::sort(pairs.begin(), pairs.end(), [](const FilterPair& x, const FilterPair& y) { return x.freq_hz < y.freq_hz; });
  }
  return out;
}

PairOverrides load_pair_overrides(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("pair overrides: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_pair_overrides(ss.str());
}

}  // namespace echoaudio::td
