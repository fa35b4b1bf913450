#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "echoaudio/error.hpp"
#include "echoaudio/esn/random.hpp"

extern char** environ;

namespace echoaudio::app {

using nlohmann::json;

namespace {

json esn_tree(const esn::EsnConfig& c) {
  return {{"n_nodes", c.n_nodes},
          {"connection_prob", c.connection_prob},
          {"spectral_radius", c.spectral_radius_target},
          {"leak_rate", c.leak_rate},
          {"input_scale", c.input_scale},
          {"bias_scale", c.bias_scale}};
}

esn::EsnConfig esn_from(const json& j, int input_dim, std::uint64_t seed) {
  esn::EsnConfig c;
  c.n_nodes = j.at("n_nodes").get<int>();
  c.connection_prob = j.at("connection_prob").get<double>();
  c.spectral_radius_target = j.at("spectral_radius").get<double>();
  c.leak_rate = j.at("leak_rate").get<double>();
  c.input_scale = j.at("input_scale").get<double>();
  c.bias_scale = j.at("bias_scale").get<double>();
  c.input_dim = input_dim;
  c.seed = seed;
  return c;
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return !(a.is_number_integer() && b.is_number_float());
  if (a.is_array() && b.is_array()) return true;
  return a.type() == b.type();
}

std::vector<std::string> split_path(const std::string& dotted, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : dotted) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

void set_leaf(json& tree, const std::vector<std::string>& path, const std::string& raw, const std::string& where) {
  json* node = &tree;
  std::string dotted;
  for (const auto& key : path) {
    dotted += (dotted.empty() ? "" : ".") + key;
    if (!node->is_object() || !node->contains(key)) throw ConfigError(where + ": unknown key '" + dotted + "'");
    node = &(*node)[key];
  }
  if (node->is_object()) throw ConfigError(where + ": '" + dotted + "' is a section, not a value");
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  if (node->is_string() && !value.is_string()) value = raw;
  if (!same_kind(*node, value)) throw ConfigError(where + ": wrong type for '" + dotted + "'");
  *node = std::move(value);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json default_tree() {
  const RunConfig d;
  const auto esn1 = td::default_mimic_esn();
  const auto esn2 = classify::ClassifierOptions::default_esn();
  return {
      {"schema_version", kSchemaVersion},
      {"dataset",
       {{"root", ""}, {"scheme", "fsdd"}, {"speakers", json::array()}, {"digits", json::array()}, {"max_per_key", 0}}},
      {"frame",
       {{"frame_len_ms", d.frame.frame_len_ms},
        {"hop_ms", d.frame.hop_ms},
        {"window", "hamming"},
        {"n_fft", d.frame.n_fft},
        {"pre_emphasis", d.frame.pre_emphasis},
        {"pre_emphasis_enabled", d.frame.pre_emphasis_enabled}}},
      {"mel",
       {{"n_filters", d.mel.n_filters},
        {"fmin_hz", d.mel.fmin_hz},
        {"fmax_hz", d.mel.fmax_hz},
        {"n_coeffs", d.mel.mfcc.n_coeffs},
        {"include_c0", d.mel.mfcc.include_c0}}},
      {"td",
       {{"n_channels", d.td.n_channels},
        {"fmin_hz", d.td.fmin_hz},
        {"fmax_hz", d.td.fmax_hz},
        {"signal_len", d.td.signal_len},
        {"pairs_override", ""},
        {"log_post_map", d.td.log_post_map},
        {"readout_mode", "joint"},
        {"washout", d.td.washout},
        {"ridge_lambda", d.td.ridge_lambda},
        {"train_clips", d.td.train_clips},
        {"eval_clips", d.td.eval_clips},
        {"exp2_features", d.td.exp2_features}}},
      {"esn1", esn_tree(esn1)},
      {"esn2", esn_tree(esn2)},
      {"experiment",
       {{"experiment", "exp1"},
        {"tasks", {"digit", "speaker"}},
        {"protocol", "holdout"},
        {"n_folds", 5},
        {"n_seeds", 10},
        {"washout", 50},
        {"ridge_lambda", classify::ClassifierOptions{}.ridge_lambda}}},
      {"output_dir", "echoaudio-out"},
      {"global_seed", 1},
      {"jobs", 1},
  };
}

void merge_tree(json& base, const json& overlay, const std::string& where) {
  if (!overlay.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (!base.contains(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_tree(slot, it.value(), where + "." + it.key());
    } else {
      if (!same_kind(slot, it.value())) throw ConfigError(where + ": wrong type for '" + it.key() + "'");
      slot = it.value();
    }
  }
}

void apply_set(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key.path=value, got '" + assignment + "'");
  set_leaf(tree, split_path(assignment.substr(0, eq), '.'), assignment.substr(eq + 1), "--set");
}

std::map<std::string, std::string> prefixed_environment() {
  std::map<std::string, std::string> out;
  const std::string prefix = kEnvPrefix;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv = *e;
    if (kv.rfind(prefix, 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

void apply_env(json& tree, const std::map<std::string, std::string>& env) {
  const std::string prefix = kEnvPrefix;
  for (const auto& [name, value] : env) {
    if (name.rfind(prefix, 0) != 0) continue;
    std::string key = name.substr(prefix.size());
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    std::vector<std::string> path;
    std::size_t start = 0;
    for (std::size_t pos; (pos = key.find("__", start)) != std::string::npos; start = pos + 2) {
      path.push_back(key.substr(start, pos - start));
    }
    path.push_back(key.substr(start));
    set_leaf(tree, path, value, "environment " + name);
  }
}

std::string config_hash(const json& tree) {
  json t = tree;
  t.erase("output_dir");
  t.erase("jobs");
  const std::string text = t.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunConfig resolve(json tree, bool require_dataset) {
  RunConfig c;
  if (get<int>(tree, "schema_version") != kSchemaVersion) {
    throw ConfigError("config: schema_version " + tree["schema_version"].dump() + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  try {
    const auto& ds = tree.at("dataset");
    c.dataset.root = get<std::string>(ds, "root");
    c.dataset.scheme = audio::parse_naming_scheme(get<std::string>(ds, "scheme"));
    c.dataset.speakers = get<std::vector<std::string>>(ds, "speakers");
    c.dataset.digits = get<std::vector<int>>(ds, "digits");
    c.dataset.max_per_key = get<int>(ds, "max_per_key");
    if (c.dataset.max_per_key < 0) throw ConfigError("config: dataset.max_per_key must be >= 0");
    for (int d : c.dataset.digits) {
      if (d < 0 || d > 9) throw ConfigError("config: dataset.digits must lie in 0..9");
    }
    if (require_dataset) {
      if (c.dataset.root.empty()) throw ConfigError("config: dataset.root is not set");
      if (!std::filesystem::is_directory(c.dataset.root)) {
        throw ConfigError("config: dataset.root does not exist: " + c.dataset.root.string());
      }
    }

    const auto& fr = tree.at("frame");
    c.frame.frame_len_ms = get<double>(fr, "frame_len_ms");
    c.frame.hop_ms = get<double>(fr, "hop_ms");
    c.frame.window = dsp::parse_window_kind(get<std::string>(fr, "window"));
    c.frame.n_fft = get<std::size_t>(fr, "n_fft");
    c.frame.pre_emphasis = get<double>(fr, "pre_emphasis");
    c.frame.pre_emphasis_enabled = get<bool>(fr, "pre_emphasis_enabled");
    c.frame.validate(audio::kCanonicalRateHz);

    const auto& mel = tree.at("mel");
    c.mel.n_filters = get<int>(mel, "n_filters");
    c.mel.fmin_hz = get<double>(mel, "fmin_hz");
    c.mel.fmax_hz = get<double>(mel, "fmax_hz");
    c.mel.mfcc.n_coeffs = get<std::size_t>(mel, "n_coeffs");
    c.mel.mfcc.include_c0 = get<bool>(mel, "include_c0");

    const auto& td = tree.at("td");
    c.td.n_channels = get<int>(td, "n_channels");
    c.td.fmin_hz = get<double>(td, "fmin_hz");
    c.td.fmax_hz = get<double>(td, "fmax_hz");
    c.td.signal_len = get<std::size_t>(td, "signal_len");
    c.td.pairs_override = get<std::string>(td, "pairs_override");
    c.td.log_post_map = get<bool>(td, "log_post_map");
    c.td.readout_mode = td::parse_readout_mode(get<std::string>(td, "readout_mode"));
    c.td.washout = get<Eigen::Index>(td, "washout");
    c.td.ridge_lambda = get<double>(td, "ridge_lambda");
    c.td.train_clips = get<int>(td, "train_clips");
    c.td.eval_clips = get<int>(td, "eval_clips");
    c.td.exp2_features = get<std::string>(td, "exp2_features");
    if (c.td.signal_len < 1) throw ConfigError("config: td.signal_len must be >= 1");
    if (c.td.washout < 0) throw ConfigError("config: td.washout must be >= 0");
    if (c.td.train_clips < 1 || c.td.eval_clips < 0) throw ConfigError("config: td.train_clips must be >= 1");
    if (c.td.exp2_features != "td_reservoir" && c.td.exp2_features != "td_direct") {
      throw ConfigError("config: td.exp2_features must be td_reservoir or td_direct");
    }
    if (!c.td.pairs_override.empty() && !std::filesystem::is_regular_file(c.td.pairs_override)) {
      throw ConfigError("config: td.pairs_override does not exist: " + c.td.pairs_override.string());
    }

    c.global_seed = get<std::uint64_t>(tree, "global_seed");
    c.jobs = get<int>(tree, "jobs");
    if (c.jobs < 1) throw ConfigError("config: jobs must be >= 1");
    c.output_dir = get<std::string>(tree, "output_dir");
    if (c.output_dir.empty()) throw ConfigError("config: output_dir is empty");

    c.esn1 = esn_from(tree.at("esn1"), 1, esn::derive_seed(c.global_seed, 0xe5a1));
    c.esn1.validate();

    const auto& ex = tree.at("experiment");
    auto& e = c.experiment;
    e.experiment = classify::parse_experiment(get<std::string>(ex, "experiment"));
    e.protocol = classify::parse_protocol(get<std::string>(ex, "protocol"));
    e.n_folds = get<int>(ex, "n_folds");
    e.n_seeds = get<int>(ex, "n_seeds");
    e.classifier.washout = get<Eigen::Index>(ex, "washout");
    e.classifier.ridge_lambda = get<double>(ex, "ridge_lambda");
    e.classifier.esn = esn_from(tree.at("esn2"), 1, 0);
    e.global_seed = c.global_seed;
    e.jobs = c.jobs;
    e.validate();
    for (const auto& t : get<std::vector<std::string>>(ex, "tasks")) c.tasks.push_back(classify::parse_task(t));
    if (c.tasks.empty()) throw ConfigError("config: experiment.tasks is empty");
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("config: ") + err.what());
  } catch (const json::exception& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
  c.hash = config_hash(tree);
  c.tree = std::move(tree);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file, const std::vector<std::string>& sets,
                          const std::map<std::string, std::string>& env, bool require_dataset) {
  json tree = default_tree();
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const json user = json::parse(ss.str(), nullptr, false, true);
    if (user.is_discarded()) throw ConfigError("config: " + file.string() + " is not valid JSON");
    merge_tree(tree, user, file.filename().string());
  }
  apply_env(tree, env);
  for (const auto& s : sets) apply_set(tree, s);
  return resolve(std::move(tree), require_dataset);
}

}  // namespace echoaudio::app
