#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "echoaudio/audio/audio_clip.hpp"

namespace echoaudio::audio {

/// File naming conventions of the supported spoken-digit corpora.
///   audio_mnist: <speaker>/<digit>_<speaker>_<index>.wav, numeric speaker id
///   fsdd:        <digit>_<speakerName>_<index>.wav, alphabetic speaker name
enum class NamingScheme { audio_mnist, fsdd };

NamingScheme parse_naming_scheme(std::string_view name);
std::string_view to_string(NamingScheme scheme);

struct ManifestEntry {
  std::string path;  // relative to the manifest root, '/' separated
  int digit_label = 0;
  std::string speaker_label;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string corpus_name;
  int sample_rate_hz = kCanonicalRateHz;
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;  // sorted by path, unique

  std::vector<std::string> speakers() const;  // sorted, unique
};

/// A .wav file under the root whose name does not fit the scheme.
struct ParseWarning {
  std::string path;
  std::string reason;
};

struct ManifestScan {
  DatasetManifest manifest;
  std::vector<ParseWarning> warnings;
};

/// Parses a single file name (no directories). Returns false on mismatch.
bool parse_file_name(std::string_view file_name, NamingScheme scheme, ManifestEntry& out);

/// Recursively catalogues every .wav file under `root_dir`.
/// Throws DataError if the directory is missing and EmptyDatasetError if no
/// file parses.
ManifestScan build_manifest(const std::filesystem::path& root_dir, NamingScheme scheme);

/// `path,digit,speaker` with a header line; entries in manifest order.
std::string manifest_to_csv(const DatasetManifest& manifest);
std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view json, const std::filesystem::path& root);

/// Loads an entry, attaches its labels, and resamples to the manifest rate.
AudioClip load_entry(const DatasetManifest& manifest, const ManifestEntry& entry);

}  // namespace echoaudio::audio
