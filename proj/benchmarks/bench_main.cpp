#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "echoaudio/dsp/fft.hpp"
#include "echoaudio/dsp/mel.hpp"
#include "echoaudio/dsp/mfcc.hpp"
#include "echoaudio/esn/esn.hpp"
#include "echoaudio/esn/random.hpp"
#include "echoaudio/td/conv.hpp"
#include "echoaudio/td/filterbank.hpp"

using namespace echoaudio;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  esn::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-0.5, 0.5);
  return v;
}

void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dsp::dft(x, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNLogN);

void BM_NaiveDft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  std::vector<std::complex<double>> out(n);
  for (auto _ : state) {
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * k * j / n);
      out[k] = acc;
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NaiveDft)->RangeMultiplier(4)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_Mfcc(benchmark::State& state) {
  audio::AudioClip clip;
  clip.samples = noise(8000, 2);
  const auto fb = dsp::make_mel_filterbank();
  const dsp::FrameConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(dsp::mfcc(clip, cfg, fb));
}
BENCHMARK(BM_Mfcc)->Unit(benchmark::kMillisecond);

void BM_Convolve(benchmark::State& state) {
  const auto a = noise(static_cast<std::size_t>(state.range(0)), 3);
  const auto f = noise(200, 4);
  for (auto _ : state) benchmark::DoNotOptimize(td::convolve(a, f));
}
BENCHMARK(BM_Convolve)->Arg(1000)->Arg(8000);

void BM_TdMfccDirect(benchmark::State& state) {
  audio::AudioClip clip;
  clip.samples = noise(8000, 5);
  const auto tdfb = td::make_td_filterbank(dsp::make_mel_filterbank(10, 1024, 0.0, 4000.0, 8000), 200);
  for (auto _ : state) benchmark::DoNotOptimize(td::td_mfcc_direct(clip, tdfb, 98));
}
BENCHMARK(BM_TdMfccDirect)->Unit(benchmark::kMillisecond);

void BM_EsnStep(benchmark::State& state) {
  esn::EsnConfig cfg;
  cfg.n_nodes = static_cast<int>(state.range(0));
  cfg.input_dim = 14;
  const auto e = esn::init_reservoir(cfg);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cfg.n_nodes), scratch(cfg.n_nodes), out(cfg.n_nodes);
  const auto u = noise(14, 6);
  for (auto _ : state) {
    esn::step_into(e, x, u.data(), scratch, out);
    x.swap(out);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_EsnStep)->Arg(35)->Arg(100)->Arg(400);

void BM_InitReservoir(benchmark::State& state) {
  esn::EsnConfig cfg;
  cfg.n_nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(esn::init_reservoir(cfg));
}
BENCHMARK(BM_InitReservoir)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
