#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "echoaudio/audio/audio_clip.hpp"

namespace echoaudio::audio {

/// Reads a RIFF/WAVE file: PCM 8/16/24-bit or IEEE float32, mono or stereo.
/// Stereo is averaged to mono. Integer PCM is divided by its full-scale value
/// (128, 32768, 8388608); float data peaking above 1 is rescaled by its peak.
///
/// Throws FormatError, UnsupportedFormatError or EmptyAudioError.
AudioClip load_wav(const std::filesystem::path& path);

/// Same as load_wav() for an in-memory file image.
AudioClip decode_wav(std::span<const std::uint8_t> bytes);

/// Writes mono 16-bit PCM. Samples are clipped to [-1, 1].
void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples,
                     int sample_rate_hz);

}  // namespace echoaudio::audio
