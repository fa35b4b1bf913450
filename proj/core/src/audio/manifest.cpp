#include "echoaudio/audio/manifest.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "echoaudio/audio/resample.hpp"
#include "echoaudio/audio/wav.hpp"
#include "echoaudio/error.hpp"

namespace echoaudio::audio {

namespace fs = std::filesystem;

NamingScheme parse_naming_scheme(std::string_view name) {
  if (name == "audio_mnist") return NamingScheme::audio_mnist;
  if (name == "fsdd") return NamingScheme::fsdd;
  throw std::invalid_argument("unknown naming scheme '" + std::string(name) +
                              "' (expected audio_mnist or fsdd)");
}

std::string_view to_string(NamingScheme scheme) {
  return scheme == NamingScheme::audio_mnist ? "audio_mnist" : "fsdd";
}

std::vector<std::string> DatasetManifest::speakers() const {
  std::set<std::string> s;
  for (const auto& e : entries) s.insert(e.speaker_label);
  return {s.begin(), s.end()};
}

bool parse_file_name(std::string_view file_name, NamingScheme scheme, ManifestEntry& out) {
  static const std::regex audio_mnist_re(R"(^([0-9])_([0-9]+)_([0-9]+)\.[wW][aA][vV]$)");
  static const std::regex fsdd_re(R"(^([0-9])_([A-Za-z][A-Za-z_-]*?)_([0-9]+)\.[wW][aA][vV]$)");
  const std::string name(file_name);
  std::smatch m;
  const auto& re = scheme == NamingScheme::audio_mnist ? audio_mnist_re : fsdd_re;
  if (!std::regex_match(name, m, re)) return false;
  out.digit_label = m[1].str()[0] - '0';
  out.speaker_label = m[2].str();
  return true;
}

ManifestScan build_manifest(const fs::path& root_dir, NamingScheme scheme) {
  std::error_code ec;
  if (!fs::is_directory(root_dir, ec)) {
    throw DataError("manifest: not a directory: " + root_dir.string());
  }

  ManifestScan scan;
  scan.manifest.corpus_name = std::string(to_string(scheme));
  scan.manifest.sample_rate_hz = kCanonicalRateHz;
  scan.manifest.root = root_dir;

  std::vector<fs::path> wavs;
  for (const auto& de : fs::recursive_directory_iterator(root_dir)) {
    if (!de.is_regular_file()) continue;
    std::string ext = de.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") wavs.push_back(de.path());
  }
  std::sort(wavs.begin(), wavs.end());

  for (const auto& p : wavs) {
    const std::string rel = fs::relative(p, root_dir).generic_string();
    ManifestEntry entry;
    entry.path = rel;
    if (parse_file_name(p.filename().string(), scheme, entry)) {
      scan.manifest.entries.push_back(std::move(entry));
      continue;
    }
    ManifestEntry other;
    const NamingScheme alt = scheme == NamingScheme::fsdd ? NamingScheme::audio_mnist : NamingScheme::fsdd;
    std::string reason = "file name does not match the " + std::string(to_string(scheme)) + " scheme";
    if (parse_file_name(p.filename().string(), alt, other)) {
      reason += " (looks like " + std::string(to_string(alt)) + ")";
    }
    scan.warnings.push_back({rel, std::move(reason)});
  }

  // generic_string ordering can differ from path ordering on separators.
  std::sort(scan.manifest.entries.begin(), scan.manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });

  if (scan.manifest.entries.empty()) {
    throw EmptyDatasetError("manifest: no " + std::string(to_string(scheme)) + " .wav files under " +
                            root_dir.string());
  }
  return scan;
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::ostringstream os;
  os << "path,digit,speaker\n";
  for (const auto& e : manifest.entries) os << e.path << ',' << e.digit_label << ',' << e.speaker_label << '\n';
  return os.str();
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  nlohmann::json j;
  j["corpus_name"] = manifest.corpus_name;
  j["sample_rate_hz"] = manifest.sample_rate_hz;
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    arr.push_back({{"path", e.path}, {"digit", e.digit_label}, {"speaker", e.speaker_label}});
  }
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view json, const fs::path& root) {
  const auto j = nlohmann::json::parse(json);
  DatasetManifest m;
  m.corpus_name = j.at("corpus_name").get<std::string>();
  m.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  m.root = root;
  std::set<std::string> seen;
  for (const auto& e : j.at("entries")) {
    ManifestEntry entry{e.at("path").get<std::string>(), e.at("digit").get<int>(),
                        e.at("speaker").get<std::string>()};
    if (entry.digit_label < 0 || entry.digit_label > 9 || entry.speaker_label.empty()) {
      throw DataError("manifest: bad labels for " + entry.path);
    }
    if (!seen.insert(entry.path).second) throw DataError("manifest: duplicate path " + entry.path);
    m.entries.push_back(std::move(entry));
  }
  return m;
}

AudioClip load_entry(const DatasetManifest& manifest, const ManifestEntry& entry) {
  AudioClip clip = resample(load_wav(manifest.root / entry.path), manifest.sample_rate_hz);
  clip.digit_label = entry.digit_label;
  clip.speaker_label = entry.speaker_label;
  clip.source_path = entry.path;
  return clip;
}

}  // namespace echoaudio::audio
