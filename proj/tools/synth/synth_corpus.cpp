#include "synth_corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "echoaudio/audio/wav.hpp"
#include "echoaudio/esn/random.hpp"

namespace echoaudio::synth {

namespace {

enum class Kind { voiced, noise, voiced_noise, silence };

struct Segment {
  Kind kind;
  double ms;
  std::array<double, 3> f_start;  // formants, or {center, bandwidth, -} for noise
  std::array<double, 3> f_end;
  double gain = 1.0;
};

using F = std::array<double, 3>;

const F kNone{0, 0, 0};

// Rough phone sequences for the English digit names.
std::vector<Segment> digit_template(int digit) {
  switch (digit) {
    case 0:
      return {{Kind::voiced_noise, 70, {4200, 1500, 0}, {4200, 1500, 0}, 0.3},
              {Kind::voiced, 90, {400, 2000, 2600}, {420, 1800, 2500}},
              {Kind::voiced, 70, {450, 1300, 1600}, {480, 1200, 1700}},
              {Kind::voiced, 150, {500, 900, 2400}, {420, 800, 2400}}};
    case 1:
      return {{Kind::voiced, 60, {300, 700, 2300}, {450, 850, 2400}, 0.7},
              {Kind::voiced, 150, {650, 1100, 2500}, {600, 1200, 2500}},
              {Kind::voiced, 90, {260, 1700, 2600}, {250, 1700, 2600}, 0.4}};
    case 2:
      return {{Kind::silence, 30, kNone, kNone},
              {Kind::noise, 25, {3500, 2000, 0}, {3500, 2000, 0}, 0.6},
              {Kind::voiced, 200, {330, 1100, 2300}, {300, 850, 2250}}};
    case 3:
      return {{Kind::noise, 70, {3000, 2500, 0}, {3000, 2500, 0}, 0.15},
              {Kind::voiced, 50, {400, 1300, 1700}, {350, 1600, 2000}, 0.7},
              {Kind::voiced, 190, {300, 2200, 2900}, {270, 2300, 3000}}};
    case 4:
      return {{Kind::noise, 90, {2500, 3000, 0}, {2500, 3000, 0}, 0.25},
              {Kind::voiced, 150, {520, 850, 2500}, {480, 900, 2400}},
              {Kind::voiced, 90, {460, 1250, 1650}, {440, 1300, 1600}, 0.8}};
    case 5:
      return {{Kind::noise, 80, {2500, 3000, 0}, {2500, 3000, 0}, 0.25},
              {Kind::voiced, 220, {720, 1200, 2500}, {360, 2100, 2700}},
              {Kind::voiced_noise, 70, {2000, 3000, 0}, {2000, 3000, 0}, 0.2}};
    case 6:
      return {{Kind::noise, 110, {3800, 1500, 0}, {3800, 1500, 0}, 0.6},
              {Kind::voiced, 110, {400, 1950, 2600}, {420, 1850, 2600}},
              {Kind::silence, 50, kNone, kNone},
              {Kind::noise, 20, {2000, 1500, 0}, {2000, 1500, 0}, 0.5},
              {Kind::noise, 110, {3800, 1500, 0}, {3800, 1500, 0}, 0.6}};
    case 7:
      return {{Kind::noise, 100, {3800, 1500, 0}, {3800, 1500, 0}, 0.6},
              {Kind::voiced, 100, {560, 1800, 2500}, {540, 1750, 2500}},
              {Kind::voiced_noise, 50, {2000, 3000, 0}, {2000, 3000, 0}, 0.2},
              {Kind::voiced, 80, {560, 1250, 2500}, {520, 1300, 2500}, 0.8},
              {Kind::voiced, 80, {260, 1700, 2600}, {250, 1700, 2600}, 0.4}};
    case 8:
      return {{Kind::voiced, 220, {520, 1850, 2500}, {350, 2250, 2900}},
              {Kind::silence, 50, kNone, kNone},
              {Kind::noise, 30, {3500, 2000, 0}, {3500, 2000, 0}, 0.6}};
    case 9:
      return {{Kind::voiced, 70, {260, 1700, 2600}, {260, 1600, 2600}, 0.4},
              {Kind::voiced, 200, {720, 1200, 2500}, {360, 2100, 2700}},
              {Kind::voiced, 100, {260, 1700, 2600}, {250, 1700, 2600}, 0.4}};
    default:
      throw std::invalid_argument("synth: digit must be 0..9");
  }
}

struct Resonator {
  double y1 = 0, y2 = 0;
  double run(double x, double freq, double bw, int fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    const double b1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
    const double b2 = -r * r;
    const double y = (1.0 - r) * x + b1 * y1 + b2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

const std::array<const char*, 12> kNames = {"ana",  "bruno", "cleo", "dmitri", "eve",  "farid",
                                            "greta", "hugo", "iris", "jonas",  "kemal", "lena"};

}  // namespace

std::vector<Voice> make_voices(int n_speakers, std::uint64_t seed) {
  if (n_speakers < 1 || n_speakers > static_cast<int>(kNames.size())) {
    throw std::invalid_argument("synth: n_speakers must lie in [1, 12]");
  }
  esn::Rng rng(seed);
  std::vector<Voice> voices;
  for (int i = 0; i < n_speakers; ++i) {
    Voice v;
    v.name = kNames[static_cast<std::size_t>(i)];
    // Spread voices over the pitch / tract-length plane, alternating low and high.
    const double u = n_speakers > 1 ? static_cast<double>(i) / (n_speakers - 1) : 0.5;
    const double pos = i % 2 == 0 ? 0.5 * u : 0.5 + 0.5 * u;
    v.f0_hz = 85.0 * std::pow(250.0 / 85.0, pos) * rng.uniform(0.97, 1.03);
    v.formant_scale = (0.86 + 0.32 * pos) * rng.uniform(0.99, 1.01);
    v.rate = rng.uniform(0.85, 1.2);
    voices.push_back(v);
  }
  return voices;
}

audio::AudioClip synth_digit(int digit, const Voice& voice, std::uint64_t seed, int fs) {
  esn::Rng rng(seed);
  const auto segments = digit_template(digit);
  const double rate = voice.rate * rng.uniform(0.9, 1.1);
  const double f0 = voice.f0_hz * rng.uniform(0.93, 1.07);
  const double fscale = voice.formant_scale * rng.uniform(0.97, 1.03);
  const double tilt = rng.uniform(0.85, 0.95);

  std::vector<double> out;
  const auto lead = static_cast<std::size_t>(rng.uniform(0.02, 0.08) * fs);
  out.assign(lead, 0.0);

  std::array<Resonator, 3> formant{};
  Resonator noise_filter;
  double phase = 0.0, glottal = 0.0;
  for (const auto& seg : segments) {
    const auto n = static_cast<std::size_t>(seg.ms / 1000.0 / rate * fs * rng.uniform(0.9, 1.1));
    const double ramp = std::max(1.0, 0.008 * fs);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
      const double env = std::min({1.0, (static_cast<double>(k) + 1.0) / ramp, static_cast<double>(n - k) / ramp});
      double s = 0.0;
      if (seg.kind == Kind::voiced || seg.kind == Kind::voiced_noise) {
        const double pitch = f0 * (1.0 + 0.03 * std::sin(2.0 * std::numbers::pi * 5.0 * static_cast<double>(out.size()) / fs)) *
                             (1.0 - 0.1 * u);
        phase += pitch / fs;
        double pulse = 0.0;
        if (phase >= 1.0) {
          phase -= 1.0;
          pulse = 1.0;
        }
        glottal = tilt * glottal + pulse;
      }
      if (seg.kind == Kind::voiced) {
        double v = glottal;
        for (std::size_t i = 0; i < 3; ++i) {
          const double f = (seg.f_start[i] + u * (seg.f_end[i] - seg.f_start[i])) * fscale;
          v = formant[i].run(v, std::min(f, 0.45 * fs), 60.0 + 40.0 * static_cast<double>(i), fs);
        }
        s = 4.0 * v;
      } else if (seg.kind == Kind::noise || seg.kind == Kind::voiced_noise) {
        const double center = std::min(seg.f_start[0] * fscale, 0.45 * fs);
        s = 2.0 * noise_filter.run(rng.uniform(-1.0, 1.0), center, seg.f_start[1], fs);
        if (seg.kind == Kind::voiced_noise) s += 0.5 * formant[0].run(glottal, 250.0 * fscale, 80.0, fs);
      }
      out.push_back(seg.gain * env * s);
    }
  }
  out.resize(out.size() + static_cast<std::size_t>(rng.uniform(0.02, 0.08) * fs), 0.0);

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.0 ? rng.uniform(0.5, 0.9) / peak : 1.0;
  for (double& v : out) v = v * gain + 0.002 * rng.uniform(-1.0, 1.0);

  audio::AudioClip clip;
  clip.samples = std::move(out);
  clip.sample_rate_hz = fs;
  clip.digit_label = digit;
  clip.speaker_label = voice.name;
  return clip;
}

std::vector<audio::AudioClip> make_corpus(const CorpusSpec& spec) {
  if (spec.n_takes < 1) throw std::invalid_argument("synth: n_takes must be >= 1");
  const auto voices = make_voices(spec.n_speakers, spec.seed);
  std::vector<audio::AudioClip> clips;
  for (int d : spec.digits) {
    for (std::size_t s = 0; s < voices.size(); ++s) {
      for (int t = 0; t < spec.n_takes; ++t) {
        const std::uint64_t key = (static_cast<std::uint64_t>(d) * 1000 + s) * 1000 + static_cast<std::uint64_t>(t);
        auto clip = synth_digit(d, voices[s], esn::derive_seed(spec.seed, key), spec.sample_rate_hz);
        clip.source_path = std::to_string(d) + "_" + voices[s].name + "_" + std::to_string(t) + ".wav";
        clips.push_back(std::move(clip));
      }
    }
  }
  return clips;
}

std::size_t write_corpus(const std::filesystem::path& dir, const CorpusSpec& spec) {
  std::filesystem::create_directories(dir);
  const auto clips = make_corpus(spec);
  for (const auto& c : clips) audio::write_wav_pcm16(dir / c.source_path, c.samples, c.sample_rate_hz);
  return clips.size();
}

}  // namespace echoaudio::synth
