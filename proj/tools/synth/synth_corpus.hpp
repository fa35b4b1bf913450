#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "echoaudio/audio/audio_clip.hpp"

namespace echoaudio::synth {

/// Crude source-filter voice: glottal pulse train through three formant
/// resonators, plus filtered noise for fricatives and bursts.
struct Voice {
  std::string name;
  double f0_hz = 120.0;
  double formant_scale = 1.0;  // vocal tract length proxy
  double rate = 1.0;           // > 1 speaks faster
};

std::vector<Voice> make_voices(int n_speakers, std::uint64_t seed);

/// One utterance of `digit` with per-take jitter drawn from `seed`.
audio::AudioClip synth_digit(int digit, const Voice& voice, std::uint64_t seed, int sample_rate_hz = 8000);

struct CorpusSpec {
  int n_speakers = 4;
  int n_takes = 10;
  std::vector<int> digits = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::uint64_t seed = 7;
  int sample_rate_hz = 8000;
};

/// Clips ordered by (digit, speaker, take), labelled, with FSDD-style
/// source paths "<digit>_<speaker>_<take>.wav".
std::vector<audio::AudioClip> make_corpus(const CorpusSpec& spec);

/// Writes make_corpus(spec) as 16-bit PCM files; returns the file count.
std::size_t write_corpus(const std::filesystem::path& dir, const CorpusSpec& spec);

}  // namespace echoaudio::synth
