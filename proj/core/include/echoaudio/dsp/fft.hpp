#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace echoaudio::dsp {

using Complex = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 FFT, X(k) = sum_n x(n) e^{-j 2 pi n k / N}.
/// `inverse` flips the exponent sign and divides by N.
/// Throws std::invalid_argument when the size is not a power of two.
void fft_inplace(std::span<Complex> data, bool inverse = false);

/// Zero-pads a real frame to n_fft points and transforms it.
std::vector<Complex> dft(std::span<const double> frame, std::size_t n_fft);

/// Inverse transform of a full complex spectrum.
std::vector<Complex> idft(std::span<const Complex> spectrum);

}  // namespace echoaudio::dsp
