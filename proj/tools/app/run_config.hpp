#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "echoaudio/audio/manifest.hpp"
#include "echoaudio/classify/experiment.hpp"
#include "echoaudio/dsp/framing.hpp"
#include "echoaudio/dsp/mfcc.hpp"
#include "echoaudio/esn/esn.hpp"
#include "echoaudio/td/conv_reservoir.hpp"

namespace echoaudio::app {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kEnvPrefix = "ECHOAUDIO_";

struct DatasetConfig {
  std::filesystem::path root;
  audio::NamingScheme scheme = audio::NamingScheme::fsdd;
  std::vector<std::string> speakers;  // empty = all
  std::vector<int> digits;            // empty = all
  int max_per_key = 0;                // clips per (digit, speaker); 0 = all
};

struct MelConfig {
  int n_filters = 25;
  double fmin_hz = 0.0;
  double fmax_hz = 4000.0;
  dsp::MfccOptions mfcc;
};

struct TdConfig {
  int n_channels = 10;
  double fmin_hz = 0.0;
  double fmax_hz = 4000.0;
  std::size_t signal_len = 200;
  std::filesystem::path pairs_override;
  bool log_post_map = false;
  td::ReadoutMode readout_mode = td::ReadoutMode::joint;
  Eigen::Index washout = 50;
  double ridge_lambda = esn::kDefaultRidgeLambda;
  int train_clips = 50;
  int eval_clips = 20;
  std::string exp2_features = "td_reservoir";
};

struct RunConfig {
  DatasetConfig dataset;
  dsp::FrameConfig frame;
  MelConfig mel;
  TdConfig td;
  esn::EsnConfig esn1;
  classify::ExperimentConfig experiment;  // carries esn2 in experiment.classifier.esn
  std::vector<classify::Task> tasks;
  std::filesystem::path output_dir;
  std::uint64_t global_seed = 1;
  int jobs = 1;

  nlohmann::json tree;  // fully resolved key-value tree
  std::string hash;
};

/// Defaults for every key; the schema is exactly this tree.
nlohmann::json default_tree();

/// Strict deep merge: keys absent from `base` and type changes throw ConfigError.
void merge_tree(nlohmann::json& base, const nlohmann::json& overlay, const std::string& where);

/// "a.b.c=value"; the value is parsed as JSON and otherwise taken as a string.
void apply_set(nlohmann::json& tree, const std::string& assignment);

/// ECHOAUDIO_A__B=value sets a.b (lower-cased).
void apply_env(nlohmann::json& tree, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> prefixed_environment();

/// FNV-1a 64 of the canonical dump, ignoring output_dir and jobs.
std::string config_hash(const nlohmann::json& tree);

/// tree -> typed config, checking module invariants and that paths exist.
RunConfig resolve(nlohmann::json tree, bool require_dataset = true);

/// File (optional), then environment, then --set assignments.
RunConfig load_run_config(const std::filesystem::path& file, const std::vector<std::string>& sets,
                          const std::map<std::string, std::string>& env, bool require_dataset = true);

}  // namespace echoaudio::app
