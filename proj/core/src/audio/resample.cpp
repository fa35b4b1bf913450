#include "echoaudio/audio/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace echoaudio::audio {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

void validate(const AudioClip& clip) {
  if (clip.samples.empty()) throw std::invalid_argument("AudioClip: no samples");
  if (clip.sample_rate_hz <= 0) throw std::invalid_argument("AudioClip: sample rate must be > 0");
  for (double v : clip.samples) {
    if (!std::isfinite(v) || std::abs(v) > 1.0) {
      throw std::invalid_argument("AudioClip: sample outside [-1, 1] in " + clip.source_path);
    }
  }
  if (clip.digit_label && (*clip.digit_label < 0 || *clip.digit_label > 9)) {
    throw std::invalid_argument("AudioClip: digit label outside 0..9");
  }
}

AudioClip resample(const AudioClip& clip, int target_rate_hz, const ResamplerQuality& quality) {
  if (target_rate_hz <= 0) {
    throw std::invalid_argument("resample: target rate must be > 0, got " + std::to_string(target_rate_hz));
  }
  if (clip.sample_rate_hz <= 0) throw std::invalid_argument("resample: source rate must be > 0");
  if (target_rate_hz == clip.sample_rate_hz) return clip;

  const double src = clip.sample_rate_hz;
  const double dst = target_rate_hz;
  const double ratio = dst / src;
  const auto n_in = static_cast<std::ptrdiff_t>(clip.samples.size());
  const auto n_out = std::max<std::ptrdiff_t>(1, std::llround(static_cast<double>(n_in) * ratio));

  // Cutoff in cycles per input sample, below the lower of the two Nyquists.
  const double cutoff = quality.rolloff * 0.5 * std::min(src, dst) / src;
  const double half_width = quality.zero_crossings / (2.0 * cutoff);
  const double i0_beta = std::cyl_bessel_i(0.0, quality.kaiser_beta);

  AudioClip out = clip;
  out.sample_rate_hz = target_rate_hz;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);

  double peak = 0.0;
  for (std::ptrdiff_t j = 0; j < n_out; ++j) {
    const double t = static_cast<double>(j) / ratio;
    const auto first = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(t - half_width)));
    const auto last = std::min<std::ptrdiff_t>(n_in - 1, static_cast<std::ptrdiff_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::ptrdiff_t i = first; i <= last; ++i) {
      const double d = t - static_cast<double>(i);
      const double r = d / half_width;
      const double window = std::cyl_bessel_i(0.0, quality.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
      acc += clip.samples[static_cast<std::size_t>(i)] * 2.0 * cutoff * sinc(2.0 * cutoff * d) * window;
    }
    out.samples[static_cast<std::size_t>(j)] = acc;
    peak = std::max(peak, std::abs(acc));
  }
  if (peak > 1.0) {
    for (double& v : out.samples) v /= peak;
  }
  return out;
}

}  // namespace echoaudio::audio
