#include "echoaudio/dsp/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace echoaudio::dsp {

void fft_inplace(std::span<Complex> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("fft: size " + std::to_string(n) + " is not a power of two");
  }
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  // Twiddles are evaluated directly rather than by recurrence so the error
  // stays at a few ulps for N = 1024.
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<Complex> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = {std::cos(angle), std::sin(angle)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex t = twiddle[k * stride] * data[start + k + half];
        const Complex u = data[start + k];
        data[start + k] = u + t;
        data[start + k + half] = u - t;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= scale;
  }
}

std::vector<Complex> dft(std::span<const double> frame, std::size_t n_fft) {
  if (!is_power_of_two(n_fft)) {
    throw std::invalid_argument("dft: n_fft " + std::to_string(n_fft) + " is not a power of two");
  }
  if (frame.size() > n_fft) {
    throw std::invalid_argument("dft: frame of " + std::to_string(frame.size()) + " samples exceeds n_fft " +
                                std::to_string(n_fft));
  }
  std::vector<Complex> out(n_fft);
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = frame[i];
  fft_inplace(out);
  return out;
}

std::vector<Complex> idft(std::span<const Complex> spectrum) {
  std::vector<Complex> out(spectrum.begin(), spectrum.end());
  fft_inplace(out, true);
  return out;
}

}  // namespace echoaudio::dsp
