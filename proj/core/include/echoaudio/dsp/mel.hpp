#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace echoaudio::dsp {

/// 2595 * log10(1 + f / 700). Throws std::invalid_argument for f < 0.
double hz_to_mel(double f_hz);
/// 700 * (10^(mel / 2595) - 1). Throws std::invalid_argument for mel < 0.
double mel_to_hz(double mel);

/// Triangular filters over the one-sided power spectrum. Filter i rises from
/// edge_bins[i] to a peak of exactly 1.0 at edge_bins[i + 1] and falls back to
/// zero at edge_bins[i + 2]. Immutable after construction.
struct MelFilterbank {
  Eigen::MatrixXd weights;           // n_filters x (n_fft / 2 + 1)
  std::vector<double> center_freqs_hz;
  std::vector<std::size_t> edge_bins;  // n_filters + 2
  int n_filters = 25;
  std::size_t n_fft = 1024;
  double fmin_hz = 0.0;
  double fmax_hz = 4000.0;
  int sample_rate_hz = 8000;

  std::size_t n_bins() const { return n_fft / 2 + 1; }
  double bin_hz(std::size_t bin) const { return static_cast<double>(bin) * sample_rate_hz / static_cast<double>(n_fft); }
};

/// Edges are spaced uniformly in mel between fmin and fmax and snapped to the
/// nearest FFT bin. Throws DegenerateFilterError when two consecutive edges
/// share a bin, std::invalid_argument on a bad band or size.
MelFilterbank make_mel_filterbank(int n_filters = 25, std::size_t n_fft = 1024, double fmin_hz = 0.0,
                                  double fmax_hz = 4000.0, int sample_rate_hz = 8000);

/// s(m) = sum_k weights(m, k) * power(k).
std::vector<double> apply_filterbank(std::span<const double> power, const MelFilterbank& fb);

}  // namespace echoaudio::dsp
