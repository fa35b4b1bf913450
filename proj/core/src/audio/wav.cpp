#include "echoaudio/audio/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "echoaudio/error.hpp"

namespace echoaudio::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

bool tag_is(const std::uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits_per_sample = 0;
};

FormatChunk parse_fmt(const std::uint8_t* p, std::uint32_t size) {
  if (size < 16) throw FormatError("wav: fmt chunk shorter than 16 bytes");
  FormatChunk fmt;
  fmt.format = read_u16(p);
  fmt.channels = read_u16(p + 2);
  fmt.sample_rate = read_u32(p + 4);
  fmt.block_align = read_u16(p + 12);
  fmt.bits_per_sample = read_u16(p + 14);
  if (fmt.format == kFormatExtensible) {
    if (size < 40) throw FormatError("wav: truncated WAVE_FORMAT_EXTENSIBLE header");
    // The first two bytes of the subformat GUID carry the actual format tag.
    fmt.format = read_u16(p + 24);
  }
  return fmt;
}

double decode_sample(const std::uint8_t* p, const FormatChunk& fmt) {
  switch (fmt.bits_per_sample) {
    case 8:
      return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case 16:
      return static_cast<double>(static_cast<std::int16_t>(read_u16(p))) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return static_cast<double>(v) / 8388608.0;
    }
    case 32: {
      const std::uint32_t bits = read_u32(p);
      float f;
      std::memcpy(&f, &bits, sizeof f);
      return static_cast<double>(f);
    }
    default:
      return 0.0;
  }
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
    throw FormatError("wav: missing RIFF/WAVE signature");
  }

  std::optional<FormatChunk> fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::uint32_t size = read_u32(hdr + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;

    if (tag_is(hdr, "fmt ")) {
      if (size > available) throw FormatError("wav: fmt chunk runs past end of file");
      fmt = parse_fmt(bytes.data() + body, size);
    } else if (tag_is(hdr, "data")) {
      // Streamed writers leave the size as 0 or 0xFFFFFFFF; take what is there.
      const std::size_t n = (size == 0 || size > available) ? available : size;
      data = bytes.subspan(body, n);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1u);
  }

  if (!fmt) throw FormatError("wav: no fmt chunk");
  if (!have_data) throw FormatError("wav: no data chunk");

  if (fmt->format != kFormatPcm && fmt->format != kFormatFloat) {
    throw UnsupportedFormatError("wav: unsupported codec tag " + std::to_string(fmt->format));
  }
  const bool is_float = fmt->format == kFormatFloat;
  const auto bits = fmt->bits_per_sample;
  if (is_float ? bits != 32 : (bits != 8 && bits != 16 && bits != 24)) {
    throw UnsupportedFormatError("wav: unsupported sample width " + std::to_string(bits) +
                                 (is_float ? " (float)" : " (pcm)"));
  }
  if (fmt->channels != 1 && fmt->channels != 2) {
    throw UnsupportedFormatError("wav: " + std::to_string(fmt->channels) +
                                 " channels; only mono and stereo are supported");
  }
  if (fmt->sample_rate == 0) throw FormatError("wav: sample rate is zero");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
  if (fmt->block_align != 0 && fmt->block_align != frame_bytes) {
    throw FormatError("wav: block_align disagrees with channels * sample width");
  }

  const std::size_t n_frames = data.size() / frame_bytes;
  if (n_frames == 0) throw EmptyAudioError("wav: data chunk holds no samples");

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(fmt->sample_rate);
  clip.samples.resize(n_frames);
  double peak = 0.0;
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::uint8_t* frame = data.data() + i * frame_bytes;
    double v = decode_sample(frame, *fmt);
    if (fmt->channels == 2) v = 0.5 * (v + decode_sample(frame + bytes_per_sample, *fmt));
    if (!std::isfinite(v)) throw FormatError("wav: non-finite float sample");
    clip.samples[i] = v;
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 1.0) {
    for (double& v : clip.samples) v /= peak;
  }
  return clip;
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("wav: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    AudioClip clip = decode_wav(bytes);
    clip.source_path = path.generic_string();
    return clip;
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " [" + path.string() + "]");
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(std::string(e.what()) + " [" + path.string() + "]");
  } catch (const EmptyAudioError& e) {
    throw EmptyAudioError(std::string(e.what()) + " [" + path.string() + "]");
  }
}

void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples,
                     int sample_rate_hz) {
  if (sample_rate_hz <= 0) throw std::invalid_argument("write_wav_pcm16: sample rate must be > 0");
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  auto put_u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto put_u32 = [&](std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
  };
  put_tag("RIFF");
  put_u32(36 + data_bytes);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);
  put_u32(static_cast<std::uint32_t>(sample_rate_hz));
  put_u32(static_cast<std::uint32_t>(sample_rate_hz) * 2);
  put_u16(2);
  put_u16(16);
  put_tag("data");
  put_u32(data_bytes);
  for (double s : samples) {
    const double clipped = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(std::clamp(clipped * 32768.0, -32768.0, 32767.0)));
    put_u16(static_cast<std::uint16_t>(q));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("wav: cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

}  // namespace echoaudio::audio
