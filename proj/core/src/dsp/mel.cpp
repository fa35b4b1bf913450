#include "echoaudio/dsp/mel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "echoaudio/dsp/fft.hpp"
#include "echoaudio/error.hpp"

namespace echoaudio::dsp {

double hz_to_mel(double f_hz) {
  if (!(f_hz >= 0.0)) throw std::invalid_argument("hz_to_mel: frequency must be >= 0");
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_to_hz(double mel) {
  if (!(mel >= 0.0)) throw std::invalid_argument("mel_to_hz: mel must be >= 0");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank make_mel_filterbank(int n_filters, std::size_t n_fft, double fmin_hz, double fmax_hz,
                                  int sample_rate_hz) {
  if (n_filters < 1) throw std::invalid_argument("mel filterbank: n_filters must be >= 1");
  if (!is_power_of_two(n_fft)) throw std::invalid_argument("mel filterbank: n_fft must be a power of two");
  if (sample_rate_hz <= 0) throw std::invalid_argument("mel filterbank: sample rate must be > 0");
  if (!(fmin_hz >= 0.0) || !(fmin_hz < fmax_hz) || fmax_hz > sample_rate_hz / 2.0) {
    throw std::invalid_argument("mel filterbank: need 0 <= fmin < fmax <= sample_rate / 2");
  }

  MelFilterbank fb;
  fb.n_filters = n_filters;
  fb.n_fft = n_fft;
  fb.fmin_hz = fmin_hz;
  fb.fmax_hz = fmax_hz;
  fb.sample_rate_hz = sample_rate_hz;

  const double mel_lo = hz_to_mel(fmin_hz);
  const double mel_hi = hz_to_mel(fmax_hz);
  const double step = (mel_hi - mel_lo) / (n_filters + 1);
  const std::size_t n_bins = fb.n_bins();

  fb.edge_bins.resize(static_cast<std::size_t>(n_filters) + 2);
  for (int i = 0; i < n_filters + 2; ++i) {
    const double hz = mel_to_hz(mel_lo + step * i);
    auto bin = static_cast<std::size_t>(std::llround(hz * static_cast<double>(n_fft) / sample_rate_hz));
    fb.edge_bins[static_cast<std::size_t>(i)] = std::min(bin, n_bins - 1);
    if (i >= 1 && i <= n_filters) fb.center_freqs_hz.push_back(hz);
  }

  fb.weights = Eigen::MatrixXd::Zero(n_filters, static_cast<Eigen::Index>(n_bins));
  for (int i = 0; i < n_filters; ++i) {
    const std::size_t lo = fb.edge_bins[static_cast<std::size_t>(i)];
    const std::size_t mid = fb.edge_bins[static_cast<std::size_t>(i) + 1];
    const std::size_t hi = fb.edge_bins[static_cast<std::size_t>(i) + 2];
    if (lo == mid || mid == hi) {
      throw DegenerateFilterError("mel filterbank: filter " + std::to_string(i) +
                                      " collapses (edges share an FFT bin); use fewer filters, a wider band "
                                      "or a larger n_fft",
                                  i);
    }
    for (std::size_t k = lo; k <= mid; ++k) {
      fb.weights(i, static_cast<Eigen::Index>(k)) = static_cast<double>(k - lo) / static_cast<double>(mid - lo);
    }
    for (std::size_t k = mid; k <= hi; ++k) {
      fb.weights(i, static_cast<Eigen::Index>(k)) = static_cast<double>(hi - k) / static_cast<double>(hi - mid);
    }
  }
  return fb;
}

std::vector<double> apply_filterbank(std::span<const double> power, const MelFilterbank& fb) {
  if (power.size() != fb.n_bins()) {
    throw std::invalid_argument("apply_filterbank: expected " + std::to_string(fb.n_bins()) + " bins, got " +
                                std::to_string(power.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> p(power.data(), static_cast<Eigen::Index>(power.size()));
  const Eigen::VectorXd s = fb.weights * p;
  return {s.data(), s.data() + s.size()};
}

}  // namespace echoaudio::dsp
