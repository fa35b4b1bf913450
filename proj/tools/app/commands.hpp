#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echoaudio/audio/audio_clip.hpp"
#include "echoaudio/audio/manifest.hpp"
#include "echoaudio/dsp/feature_matrix.hpp"
#include "echoaudio/td/conv_reservoir.hpp"
#include "run_config.hpp"

namespace echoaudio::app {

enum class FeatureMode { reference, td_direct, td_reservoir };

FeatureMode parse_feature_mode(std::string_view name);
std::string_view to_string(FeatureMode mode);

/// Manifest restricted to the configured speaker/digit subset; with
/// max_per_key the first clips of each (digit, speaker) in path order are kept.
audio::DatasetManifest dataset_subset(const RunConfig& cfg, std::vector<audio::ParseWarning>* warnings = nullptr);

/// "<dir>/<name>.wav" -> "<dir>_<name>", usable as a flat file stem.
std::string clip_id(const audio::ManifestEntry& entry);

std::vector<audio::AudioClip> load_clips(const audio::DatasetManifest& manifest, int jobs);

td::TimeDomainFilterbank make_tdfb(const RunConfig& cfg);

std::filesystem::path extractor_path(const RunConfig& cfg);

/// Features for every clip in order. td_reservoir needs `extractor`.
std::vector<dsp::FeatureMatrix> compute_features(const RunConfig& cfg, const std::vector<audio::AudioClip>& clips,
                                                 FeatureMode mode, const td::ConvFeatureExtractor* extractor);

/// Loads the trained extractor, or throws DataError naming train-extractor.
td::ConvFeatureExtractor require_extractor(const RunConfig& cfg);

void cmd_manifest(const RunConfig& cfg, std::ostream& log);
void cmd_extract(const RunConfig& cfg, FeatureMode mode, std::ostream& log);
void cmd_train_extractor(const RunConfig& cfg, std::ostream& log);
void cmd_run_experiment(const RunConfig& cfg, std::ostream& log);
void cmd_report(const RunConfig& cfg, std::ostream& out);

std::string version_string();

}  // namespace echoaudio::app
