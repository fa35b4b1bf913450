#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "echoaudio/dsp/feature_matrix.hpp"
#include "echoaudio/dsp/fft.hpp"
#include "echoaudio/dsp/framing.hpp"
#include "echoaudio/dsp/mel.hpp"
#include "echoaudio/dsp/mfcc.hpp"
#include "echoaudio/error.hpp"
#include "test_support.hpp"

using namespace echoaudio;
using namespace echoaudio::dsp;
using echoaudio::testing::naive_dft;
using echoaudio::testing::random_vector;

namespace {

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Triangle between three bins, built from scratch rather than from the
// library's edge arithmetic.
double triangle(std::size_t lo, std::size_t mid, std::size_t hi, std::size_t k) {
  if (k <= lo || k >= hi) return k == mid ? 1.0 : 0.0;
  if (k <= mid) return static_cast<double>(k - lo) / static_cast<double>(mid - lo);
  return static_cast<double>(hi - k) / static_cast<double>(hi - mid);
}

}  // namespace

TEST(Fft, ImpulseIsFlat) {
  std::vector<double> x(16, 0.0);
  x[0] = 1.0;
  for (const auto& v : dft(x, 16)) EXPECT_NEAR(std::abs(v - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Fft, CosineBinsMatchNaiveSum) {
  std::vector<double> x(64);
  for (int n = 0; n < 64; ++n) x[n] = std::cos(2.0 * std::numbers::pi * n * 8.0 / 64.0);
  const auto X = dft(x, 64);
  const auto ref = naive_dft(x);
  EXPECT_LT(max_abs_diff(X, ref), 1e-9);
  EXPECT_NEAR(std::abs(X[8]), 32.0, 1e-9);
  EXPECT_NEAR(std::abs(X[56]), 32.0, 1e-9);
  for (int k = 0; k < 64; ++k) {
    if (k != 8 && k != 56) EXPECT_LT(std::abs(X[k]), 1e-9);
  }
}

class FftSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(FftSizes, MatchesNaiveDft) {
  const auto n = GetParam();
  const auto x = random_vector(n, static_cast<std::uint32_t>(n));
  EXPECT_LT(max_abs_diff(dft(x, n), naive_dft(x)), 1e-9);
}

TEST_P(FftSizes, InverseRoundTripAndParseval) {
  const auto n = GetParam();
  const auto x = random_vector(n, 100 + static_cast<std::uint32_t>(n));
  const auto X = dft(x, n);
  const auto back = idft(X);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i].real(), x[i], 1e-12);
  double ex = 0, eX = 0;
  for (double v : x) ex += v * v;
  for (const auto& v : X) eX += std::norm(v);
  EXPECT_NEAR(eX, static_cast<double>(n) * ex, 1e-6 * eX);
}

INSTANTIATE_TEST_SUITE_P(PowersOfTwo, FftSizes, ::testing::Values(1, 2, 8, 64, 256, 1024));

TEST(Fft, ZeroPadsAndRejectsBadSizes) {
  const std::vector<double> x = {1.0, 2.0, 3.0};
  std::vector<double> padded = {1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_LT(max_abs_diff(dft(x, 8), naive_dft(padded)), 1e-12);
  EXPECT_THROW(dft(x, 6), std::invalid_argument);
  EXPECT_THROW(dft(x, 2), std::invalid_argument);
  EXPECT_FALSE(is_power_of_two(0));
  EXPECT_TRUE(is_power_of_two(1024));
}

TEST(PowerSpectrum, Basics) {
  std::vector<double> imp(32, 0.0);
  imp[0] = 1.0;
  const auto p = power_spectrum(dft(imp, 32));
  ASSERT_EQ(p.size(), 17u);
  for (double v : p) EXPECT_NEAR(v, 1.0, 1e-15);
  const auto z = power_spectrum(std::vector<Complex>(32));
  for (double v : z) EXPECT_EQ(v, 0.0);
}

TEST(Framing, CountsAndPadding) {
  EXPECT_EQ(frame_count(400, 200, 80), 3u);
  EXPECT_EQ(frame_count(100, 200, 80), 1u);
  EXPECT_EQ(frame_count(8000, 200, 80), 98u);

  FrameConfig cfg;
  cfg.frame_len_ms = 25;  // 200 samples
  cfg.hop_ms = 10;        // 80 samples
  std::vector<double> x(400);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const auto frames = frame_signal(x, cfg, 8000);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[1][0], 80.0);
  EXPECT_EQ(frames[2][0], 160.0);

  const std::vector<double> short_clip(100, 1.0);
  const auto one = frame_signal(short_clip, cfg, 8000);
  ASSERT_EQ(one.size(), 1u);
  ASSERT_EQ(one[0].size(), 200u);
  for (std::size_t i = 100; i < 200; ++i) EXPECT_EQ(one[0][i], 0.0);

  const std::vector<double> c(1000, 0.3);
  const auto cf = frame_signal(c, cfg, 8000);
  for (const auto& f : cf) EXPECT_EQ(f, cf.front());
}

TEST(Framing, Windows) {
  const auto h = apply_window(std::vector<double>(3, 1.0), WindowKind::hamming);
  EXPECT_NEAR(h[0], 0.08, 1e-15);
  EXPECT_NEAR(h[1], 1.0, 1e-15);
  EXPECT_NEAR(h[2], 0.08, 1e-15);
  const auto hn = apply_window(random_vector(50, 1), WindowKind::hanning);
  EXPECT_NEAR(hn.front(), 0.0, 1e-15);
  EXPECT_NEAR(hn.back(), 0.0, 1e-15);
  for (double v : apply_window(std::vector<double>(40, 0.0), WindowKind::hamming)) EXPECT_EQ(v, 0.0);
  const auto w = window_coefficients(201, WindowKind::hamming);
  EXPECT_NEAR(w[100], 1.0, 1e-15);
  EXPECT_EQ(parse_window_kind("hanning"), WindowKind::hanning);
  EXPECT_THROW(parse_window_kind("kaiser"), std::invalid_argument);
}

TEST(Framing, PreEmphasis) {
  const auto y = pre_emphasize(std::vector<double>{1.0, 1.0, 2.0}, 0.97);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_NEAR(y[1], 0.03, 1e-15);
  EXPECT_NEAR(y[2], 2.0 - 0.97, 1e-15);
}

TEST(Framing, ConfigValidation) {
  FrameConfig cfg;
  EXPECT_NO_THROW(cfg.validate(8000));
  cfg.n_fft = 128;  // shorter than a 200-sample frame
  EXPECT_THROW(cfg.validate(8000), std::invalid_argument);
  cfg = {};
  cfg.n_fft = 1000;
  EXPECT_THROW(cfg.validate(8000), std::invalid_argument);
}

TEST(Mel, Anchors) {
  EXPECT_EQ(hz_to_mel(0.0), 0.0);
  // 2595 * log10(2), evaluated with mpmath to 30 digits: 781.172843...
  EXPECT_NEAR(hz_to_mel(700.0), 781.17284, 1e-3);
  EXPECT_NEAR(hz_to_mel(1000.0), 999.99, 0.01);
  EXPECT_EQ(mel_to_hz(0.0), 0.0);
  EXPECT_NEAR(mel_to_hz(781.17284), 700.0, 1e-3);
  EXPECT_THROW(hz_to_mel(-1.0), std::invalid_argument);
  EXPECT_THROW(mel_to_hz(-1.0), std::invalid_argument);
}

TEST(Mel, RoundTripAndMonotone) {
  const auto f = random_vector(100, 42, 0.0, 4000.0);
  for (double v : f) {
    const double back = mel_to_hz(hz_to_mel(v));
    EXPECT_LE(std::abs(back - v), 1e-9 * std::max(1.0, v));
    EXPECT_LE(std::abs(hz_to_mel(mel_to_hz(v)) - v), 1e-9 * std::max(1.0, v));
  }
  for (double x = 0.0; x < 4000.0; x += 7.3) EXPECT_LT(hz_to_mel(x), hz_to_mel(x + 0.1));
}

TEST(Mel, ReferenceBankShape) {
  const auto fb = make_mel_filterbank(25, 1024, 0.0, 4000.0, 8000);
  ASSERT_EQ(fb.weights.rows(), 25);
  ASSERT_EQ(fb.weights.cols(), 513);
  ASSERT_EQ(fb.edge_bins.size(), 27u);
  for (int i = 0; i < 25; ++i) {
    EXPECT_DOUBLE_EQ(fb.weights.row(i).maxCoeff(), 1.0);
    EXPECT_GE(fb.weights.row(i).minCoeff(), 0.0);
    EXPECT_LT(fb.edge_bins[i], fb.edge_bins[i + 1]);
  }
}

TEST(Mel, TrianglesMatchIndependentGenerator) {
  const auto fb = make_mel_filterbank(25, 1024, 0.0, 4000.0, 8000);
  // Independent edge computation: uniform mel grid -> Hz -> nearest bin.
  const double top = 2595.0 * std::log10(1.0 + 4000.0 / 700.0);
  std::vector<std::size_t> bins;
  for (int i = 0; i < 27; ++i) {
    const double hz = 700.0 * (std::pow(10.0, top * i / 26.0 / 2595.0) - 1.0);
    bins.push_back(static_cast<std::size_t>(std::lround(hz * 1024.0 / 8000.0)));
  }
  EXPECT_EQ(bins, fb.edge_bins);
  for (int i = 0; i < 25; ++i) {
    for (std::size_t k = 0; k < 513; ++k) {
      ASSERT_NEAR(fb.weights(i, static_cast<Eigen::Index>(k)), triangle(bins[i], bins[i + 1], bins[i + 2], k), 1e-12)
          << "filter " << i << " bin " << k;
    }
  }
  // Crossover: at filter i's peak the previous filter is at zero.
  for (int i = 1; i < 25; ++i) {
    EXPECT_EQ(fb.weights(i - 1, static_cast<Eigen::Index>(bins[i + 1])), 0.0);
    EXPECT_EQ(fb.weights(i, static_cast<Eigen::Index>(bins[i + 1])), 1.0);
  }
}

TEST(Mel, SingleFilterPeaksAtMelMidpoint) {
  const auto fb = make_mel_filterbank(1, 1024, 0.0, 4000.0, 8000);
  const double mid_hz = mel_to_hz(hz_to_mel(4000.0) / 2.0);
  EXPECT_NEAR(fb.center_freqs_hz[0], mid_hz, 1e-9);
  EXPECT_EQ(fb.edge_bins[1], static_cast<std::size_t>(std::lround(mid_hz * 1024.0 / 8000.0)));
}

TEST(Mel, DegenerateBandNamesFilter) {
  try {
    make_mel_filterbank(40, 64, 0.0, 4000.0, 8000);
    FAIL() << "expected DegenerateFilterError";
  } catch (const DegenerateFilterError& e) {
    EXPECT_GE(e.filter_index(), 0);
  }
  EXPECT_THROW(make_mel_filterbank(10, 1024, 3000.0, 2000.0, 8000), std::invalid_argument);
  EXPECT_THROW(make_mel_filterbank(10, 1024, 0.0, 5000.0, 8000), std::invalid_argument);
}

TEST(Mel, ApplyFilterbank) {
  const auto fb = make_mel_filterbank(25, 1024, 0.0, 4000.0, 8000);
  const auto zero = apply_filterbank(std::vector<double>(513, 0.0), fb);
  for (double v : zero) EXPECT_EQ(v, 0.0);

  std::vector<double> ind(513, 0.0);
  ind[fb.edge_bins[6]] = 1.0;  // center of filter 5
  const auto s = apply_filterbank(ind, fb);
  EXPECT_EQ(s[5], 1.0);
  EXPECT_LT(s[4], 1.0);
  EXPECT_LT(s[6], 1.0);

  const auto p = random_vector(513, 9, 0.0, 1.0);
  const auto got = apply_filterbank(p, fb);
  for (int m = 0; m < 25; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 513; ++k) acc += fb.weights(m, static_cast<Eigen::Index>(k)) * p[k];
    EXPECT_NEAR(got[static_cast<std::size_t>(m)], acc, 1e-12);
  }
  EXPECT_THROW(apply_filterbank(std::vector<double>(512, 0.0), fb), std::invalid_argument);
}

TEST(Dct, ClosedForms) {
  for (double v : dct_log(std::vector<double>(25, 1.0), 14)) EXPECT_EQ(v, 0.0);
  const auto c = dct_log(std::vector<double>(25, 10.0), 14, kLogFloor, true);
  EXPECT_NEAR(c[0], 25.0, 1e-9);
  for (std::size_t n = 1; n < c.size(); ++n) EXPECT_NEAR(c[n], 0.0, 1e-9);
  EXPECT_THROW(dct_log(std::vector<double>(5, 1.0), 6), std::invalid_argument);
}

TEST(Dct, MatchesDirectSummation) {
  const auto s = random_vector(25, 77, 1e-3, 50.0);
  for (bool c0 : {false, true}) {
    const auto got = dct_log(s, 14, kLogFloor, c0);
    const int first = c0 ? 0 : 1;
    for (int n = 0; n < 14; ++n) {
      // Paper indexing: m = 1..M with (m - 0.5).
      double acc = 0.0;
      for (int m = 1; m <= 25; ++m) {
        acc += std::log10(s[static_cast<std::size_t>(m - 1)]) *
               std::cos(std::numbers::pi * (n + first) * (m - 0.5) / 25.0);
      }
      EXPECT_NEAR(got[static_cast<std::size_t>(n)], acc, 1e-9);
    }
  }
}

TEST(Dct, FloorAndPowerLinearity) {
  std::vector<double> s = {0.0, 1e-12, 5.0, 2.0};
  std::vector<double> floored = {1e-10, 1e-10, 5.0, 2.0};
  EXPECT_EQ(dct_log(s, 3), dct_log(floored, 3));
  const auto e = random_vector(20, 8, 0.1, 10.0);
  std::vector<double> cubed;
  for (double v : e) cubed.push_back(v * v * v);
  const auto a = dct_log(e, 10);
  const auto b = dct_log(cubed, 10);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 3.0 * a[i], 1e-9);
}

TEST(Mfcc, ShapeAndFrameCount) {
  audio::AudioClip clip;
  clip.samples = echoaudio::testing::sine(1000.0, 1.0, 8000, 8000.0);
  const auto fb = make_mel_filterbank();
  const auto f = mfcc(clip, {}, fb);
  EXPECT_EQ(f.n_coeffs(), 14);
  EXPECT_EQ(f.n_frames(), 98);
  EXPECT_EQ(f.coeff_kind, CoeffKind::mfcc);
  EXPECT_DOUBLE_EQ(f.frame_times_s[1], 0.01);
}

TEST(Mfcc, SilenceGivesFlooredConstant) {
  audio::AudioClip clip;
  clip.samples.assign(2000, 0.0);
  const auto fb = make_mel_filterbank();
  const auto f = mfcc(clip, {}, fb);
  const auto expect = dct_log(std::vector<double>(25, 0.0), 14);
  for (Eigen::Index t = 0; t < f.n_frames(); ++t) {
    for (Eigen::Index c = 0; c < 14; ++c) EXPECT_EQ(f.values(c, t), expect[static_cast<std::size_t>(c)]);
  }
}

TEST(Mfcc, PureToneIsStationaryAndLandsInItsBand) {
  audio::AudioClip clip;
  clip.samples = echoaudio::testing::sine(1000.0, 1.0, 8000, 8000.0);
  FrameConfig cfg;
  const auto fb = make_mel_filterbank();
  const auto f = mfcc(clip, cfg, fb);
  // Hop of 80 samples is a whole number of 1000 Hz periods: interior frames agree.
  for (Eigen::Index t = 2; t < f.n_frames() - 1; ++t) EXPECT_NEAR(f.values(0, t), f.values(0, 1), 1e-6);

  // Per-stage check on one frame: the filter containing 1000 Hz wins.
  const auto frames = frame_signal(pre_emphasize(clip.samples, cfg.pre_emphasis), cfg, 8000);
  const auto energies = apply_filterbank(power_spectrum(dft(apply_window(frames[10], cfg.window), 1024)), fb);
  const auto best = std::max_element(energies.begin(), energies.end()) - energies.begin();
  const auto bin = static_cast<std::size_t>(std::lround(1000.0 * 1024 / 8000));
  EXPECT_GT(fb.weights(best, static_cast<Eigen::Index>(bin)), 0.0);
}

TEST(Mfcc, TrailingZerosShorterThanHopDoNotChangeOutput) {
  audio::AudioClip clip;
  clip.samples = random_vector(200 + 80 * 20, 4, -0.5, 0.5);
  const auto fb = make_mel_filterbank();
  const auto a = mfcc(clip, {}, fb);
  clip.samples.resize(clip.samples.size() + 79, 0.0);
  const auto b = mfcc(clip, {}, fb);
  ASSERT_EQ(a.n_frames(), b.n_frames());
  EXPECT_EQ(a.values, b.values);
}

TEST(Mfcc, RejectsRateMismatch) {
  audio::AudioClip clip;
  clip.sample_rate_hz = 16000;
  clip.samples.assign(4000, 0.1);
  EXPECT_THROW(mfcc(clip, {}, make_mel_filterbank()), std::invalid_argument);
}

TEST(Delta, ClosedForms) {
  FeatureMatrix f;
  f.values = Eigen::MatrixXd::Constant(3, 10, 2.5);
  f.frame_times_s.assign(10, 0.0);
  EXPECT_TRUE(delta(f).values.isZero());

  FeatureMatrix ramp;
  ramp.values.resize(1, 12);
  FeatureMatrix quad;
  quad.values.resize(1, 12);
  for (int t = 0; t < 12; ++t) {
    ramp.values(0, t) = t;
    quad.values(0, t) = t * t;
  }
  ramp.frame_times_s.assign(12, 0.0);
  quad.frame_times_s.assign(12, 0.0);
  const auto d = delta(ramp);
  for (int t = 2; t < 10; ++t) EXPECT_NEAR(d.values(0, t), 1.0, 1e-12);
  EXPECT_EQ(d.coeff_kind, CoeffKind::delta);
  const auto dd = delta(delta(quad));
  for (int t = 4; t < 8; ++t) EXPECT_NEAR(dd.values(0, t), 2.0, 1e-12);

  FeatureMatrix tiny;
  tiny.values.resize(1, 4);
  EXPECT_THROW(delta(tiny), std::invalid_argument);
}

TEST(FeatureMatrix, BinaryAndCsv) {
  FeatureMatrix f;
  f.values.resize(2, 3);
  f.values << 1.5, -2.0, 3.25, 1e-300, 0.0, -7.0;
  f.frame_times_s = {0.0, 0.01, 0.02};
  const auto bytes = to_binary(f);
  EXPECT_EQ(bytes.substr(0, 4), "EAFM");
  EXPECT_EQ(bytes.size(), 4 + 4 + 4 + 6 * 8u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);  // little-endian rows
  const auto back = from_binary(bytes);
  EXPECT_EQ(back.values, f.values);
  EXPECT_THROW(from_binary(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(from_binary("XXXX" + bytes.substr(4)), FormatError);
  EXPECT_EQ(to_csv(f), "1.5,-2,3.25\n1e-300,0,-7\n");
  echoaudio::testing::TempDir dir("eafm");
  save_binary(dir.path() / "f.eafm", f);
  EXPECT_EQ(load_binary(dir.path() / "f.eafm").values, f.values);
}

TEST(FeatureMatrix, ZScore) {
  FeatureMatrix a, b;
  a.values.resize(2, 2);
  a.values << 1, 3, 5, 5;
  b.values.resize(2, 2);
  b.values << 5, 7, 5, 5;
  const auto z = ZScore::fit({&a, &b});
  EXPECT_DOUBLE_EQ(z.mean(0), 4.0);
  EXPECT_DOUBLE_EQ(z.stddev(0), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(z.stddev(1), 1.0);  // constant row
  const auto n = z.apply(a.values);
  EXPECT_DOUBLE_EQ(n(0, 0), -3.0 / std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(n(1, 0), 0.0);
  FeatureMatrix bad;
  bad.values.resize(0, 0);
  EXPECT_THROW(validate(bad), std::invalid_argument);
}
