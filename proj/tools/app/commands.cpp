#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "echoaudio/classify/report.hpp"
#include "echoaudio/dsp/mel.hpp"
#include "echoaudio/dsp/mfcc.hpp"
#include "echoaudio/error.hpp"
#include "echoaudio/esn/persistence.hpp"
#include "echoaudio/esn/random.hpp"
#include "echoaudio/parallel.hpp"
#include "echoaudio/version.hpp"

namespace echoaudio::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string version_string() { return ECHOAUDIO_VERSION_STRING; }

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "reference") return FeatureMode::reference;
  if (name == "td_direct") return FeatureMode::td_direct;
  if (name == "td_reservoir") return FeatureMode::td_reservoir;
  throw ConfigError("unknown feature mode '" + std::string(name) + "' (expected reference, td_direct or td_reservoir)");
}

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::reference:
      return "reference";
    case FeatureMode::td_direct:
      return "td_direct";
    default:
      return "td_reservoir";
  }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Fixed draw of training and held-out clips for Reservoir 1, independent of
// the classification seeds.
void extractor_split(const std::vector<audio::AudioClip>& clips, const RunConfig& cfg, std::vector<std::size_t>& train,
                     std::vector<std::size_t>& held_out) {
  std::vector<std::size_t> order(clips.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  esn::Rng rng(esn::derive_seed(cfg.global_seed, 0xe5a2));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto n_train = std::min<std::size_t>(order.size(), static_cast<std::size_t>(cfg.td.train_clips));
  const auto n_eval = std::min<std::size_t>(order.size() - n_train, static_cast<std::size_t>(cfg.td.eval_clips));
  train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  held_out.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                  order.begin() + static_cast<std::ptrdiff_t>(n_train + n_eval));
  std::sort(train.begin(), train.end());
  std::sort(held_out.begin(), held_out.end());
}

ordered_json double_array(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

audio::DatasetManifest dataset_subset(const RunConfig& cfg, std::vector<audio::ParseWarning>* warnings) {
  auto scan = audio::build_manifest(cfg.dataset.root, cfg.dataset.scheme);
  if (warnings) *warnings = scan.warnings;
  const std::set<std::string> speakers(cfg.dataset.speakers.begin(), cfg.dataset.speakers.end());
  const std::set<int> digits(cfg.dataset.digits.begin(), cfg.dataset.digits.end());
  std::map<std::pair<int, std::string>, int> taken;
  std::vector<audio::ManifestEntry> kept;
  for (auto& e : scan.manifest.entries) {
    if (!speakers.empty() && !speakers.count(e.speaker_label)) continue;
    if (!digits.empty() && !digits.count(e.digit_label)) continue;
    int& n = taken[{e.digit_label, e.speaker_label}];
    if (cfg.dataset.max_per_key > 0 && n >= cfg.dataset.max_per_key) continue;
    ++n;
    kept.push_back(std::move(e));
  }
  if (kept.empty()) throw EmptyDatasetError("dataset: the configured subset selects no clips");
  scan.manifest.entries = std::move(kept);
  return scan.manifest;
}

std::string clip_id(const audio::ManifestEntry& entry) {
  std::string id = fs::path(entry.path).replace_extension().generic_string();
  std::replace(id.begin(), id.end(), '/', '_');
  return id;
}

std::vector<audio::AudioClip> load_clips(const audio::DatasetManifest& manifest, int jobs) {
  std::vector<audio::AudioClip> clips(manifest.entries.size());
  parallel_for(clips.size(), jobs, [&](std::size_t i) { clips[i] = audio::load_entry(manifest, manifest.entries[i]); });
  return clips;
}

td::TimeDomainFilterbank make_tdfb(const RunConfig& cfg) {
  const auto fb = dsp::make_mel_filterbank(cfg.td.n_channels, cfg.frame.n_fft, cfg.td.fmin_hz, cfg.td.fmax_hz,
                                           audio::kCanonicalRateHz);
  td::PairOverrides overrides;
  if (!cfg.td.pairs_override.empty()) overrides = td::load_pair_overrides(cfg.td.pairs_override);
  return td::make_td_filterbank(fb, cfg.td.signal_len, overrides);
}

fs::path extractor_path(const RunConfig& cfg) { return cfg.output_dir / "extractor" / "extractor.eafx"; }

td::ConvFeatureExtractor require_extractor(const RunConfig& cfg) {
  const auto path = extractor_path(cfg);
  if (!fs::exists(path)) {
    throw DataError("no trained extractor at " + path.string() +
                    "; run `echoaudio train-extractor` with this config first");
  }
  return td::load_extractor(path);
}

std::vector<dsp::FeatureMatrix> compute_features(const RunConfig& cfg, const std::vector<audio::AudioClip>& clips,
                                                 FeatureMode mode, const td::ConvFeatureExtractor* extractor) {
  std::vector<dsp::FeatureMatrix> out(clips.size());
  const int fs_hz = audio::kCanonicalRateHz;
  const auto frame_len = cfg.frame.frame_samples(fs_hz);
  const auto hop = cfg.frame.hop_samples(fs_hz);
  const td::TdFeatureOptions td_opts{cfg.td.log_post_map};

  if (mode == FeatureMode::reference) {
    const auto fb = dsp::make_mel_filterbank(cfg.mel.n_filters, cfg.frame.n_fft, cfg.mel.fmin_hz, cfg.mel.fmax_hz, fs_hz);
    parallel_for(clips.size(), cfg.jobs, [&](std::size_t i) { out[i] = dsp::mfcc(clips[i], cfg.frame, fb, cfg.mel.mfcc); });
  } else if (mode == FeatureMode::td_direct) {
    const auto tdfb = make_tdfb(cfg);
    parallel_for(clips.size(), cfg.jobs, [&](std::size_t i) {
      out[i] = td::td_mfcc_direct(clips[i], tdfb, dsp::frame_count(clips[i].samples.size(), frame_len, hop), td_opts);
    });
  } else {
    if (extractor == nullptr) throw std::invalid_argument("compute_features: td_reservoir needs an extractor");
    parallel_for(clips.size(), cfg.jobs, [&](std::size_t i) {
      out[i] = td::td_mfcc_reservoir(clips[i], *extractor, dsp::frame_count(clips[i].samples.size(), frame_len, hop),
                                     td_opts);
    });
  }
  return out;
}

void cmd_manifest(const RunConfig& cfg, std::ostream& log) {
  std::vector<audio::ParseWarning> warnings;
  const auto manifest = dataset_subset(cfg, &warnings);
  for (const auto& w : warnings) log << "warning: " << w.path << ": " << w.reason << '\n';
  write_text(cfg.output_dir / "manifest.csv", "# config_hash: " + cfg.hash + "\n" + audio::manifest_to_csv(manifest));
  write_text(cfg.output_dir / "manifest.json", audio::manifest_to_json(manifest));
  log << "manifest: " << manifest.entries.size() << " clips, " << manifest.speakers().size() << " speakers -> "
      << (cfg.output_dir / "manifest.csv").string() << '\n';
}

void cmd_extract(const RunConfig& cfg, FeatureMode mode, std::ostream& log) {
  const auto manifest = dataset_subset(cfg);
  const auto clips = load_clips(manifest, cfg.jobs);
  std::optional<td::ConvFeatureExtractor> extractor;
  if (mode == FeatureMode::td_reservoir) extractor = require_extractor(cfg);
  const auto features = compute_features(cfg, clips, mode, extractor ? &*extractor : nullptr);

  const fs::path dir = cfg.output_dir / "features" / std::string(to_string(mode));
  fs::create_directories(dir);
  std::ostringstream index;
  index << "# config_hash: " << cfg.hash << '\n' << "clip_id,path,digit,speaker,n_coeffs,n_frames,file\n";
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto& e = manifest.entries[i];
    const std::string file = clip_id(e) + ".eafm";
    dsp::save_binary(dir / file, features[i]);
    index << clip_id(e) << ',' << e.path << ',' << e.digit_label << ',' << e.speaker_label << ','
          << features[i].n_coeffs() << ',' << features[i].n_frames() << ',' << file << '\n';
  }
  write_text(dir / "index.csv", index.str());
  log << "extract " << to_string(mode) << ": " << clips.size() << " feature files -> " << dir.string() << '\n';
}

void cmd_train_extractor(const RunConfig& cfg, std::ostream& log) {
  const auto manifest = dataset_subset(cfg);
  const auto clips = load_clips(manifest, cfg.jobs);
  std::vector<std::size_t> train_idx, eval_idx;
  extractor_split(clips, cfg, train_idx, eval_idx);

  std::vector<audio::AudioClip> train, held_out;
  for (auto i : train_idx) train.push_back(clips[i]);
  for (auto i : eval_idx) held_out.push_back(clips[i]);

  td::ConvTrainingOptions opts;
  opts.esn = cfg.esn1;
  opts.ridge_lambda = cfg.td.ridge_lambda;
  opts.washout = cfg.td.washout;
  opts.mode = cfg.td.readout_mode;
  const auto result = td::train_conv_reservoir(train, make_tdfb(cfg), opts);
  for (const auto& w : result.warnings) log << "warning: " << w << '\n';

  const auto path = extractor_path(cfg);
  fs::create_directories(path.parent_path());
  td::save_extractor(path, result.extractor);
  write_text(path.parent_path() / "extractor.config.json", esn::config_to_json(cfg.esn1));

  ordered_json m;
  m["config_hash"] = cfg.hash;
  m["readout_mode"] = td::to_string(cfg.td.readout_mode);
  m["n_nodes"] = cfg.esn1.n_nodes;
  m["n_channels"] = result.extractor.n_channels();
  m["training_nrmse"] = double_array(result.extractor.training_nrmse);
  if (!held_out.empty()) m["held_out_nrmse"] = double_array(td::mimicry_nrmse(result.extractor, held_out));
  ordered_json tc = ordered_json::array();
  for (auto i : train_idx) tc.push_back(manifest.entries[i].path);
  m["training_clips"] = tc;
  ordered_json hc = ordered_json::array();
  for (auto i : eval_idx) hc.push_back(manifest.entries[i].path);
  m["held_out_clips"] = hc;
  m["skipped_clips"] = result.warnings.size();
  write_text(path.parent_path() / "extractor.metrics.json", m.dump(2) + "\n");

  log << "train-extractor: N=" << cfg.esn1.n_nodes << " on " << train.size() << " clips -> " << path.string() << '\n';
  log << "  training NRMSE per channel:";
  for (double v : result.extractor.training_nrmse) log << ' ' << std::setprecision(4) << v;
  log << '\n';
}

void cmd_run_experiment(const RunConfig& cfg, std::ostream& log) {
  const auto manifest = dataset_subset(cfg);
  const auto clips = load_clips(manifest, cfg.jobs);

  FeatureMode mode = FeatureMode::reference;
  if (cfg.experiment.experiment == classify::Experiment::exp2) mode = parse_feature_mode(cfg.td.exp2_features);
  std::optional<td::ConvFeatureExtractor> extractor;
  if (mode == FeatureMode::td_reservoir) extractor = require_extractor(cfg);
  auto features = compute_features(cfg, clips, mode, extractor ? &*extractor : nullptr);

  std::vector<classify::Utterance> data(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    data[i].id = clip_id(manifest.entries[i]);
    data[i].digit = manifest.entries[i].digit_label;
    data[i].speaker = manifest.entries[i].speaker_label;
    data[i].features = std::move(features[i]);
  }

  for (const auto task : cfg.tasks) {
    auto ecfg = cfg.experiment;
    ecfg.task = task;
    const auto cv = classify::cross_validate(data, ecfg);
    const classify::ReportContext ctx{cfg.hash, version_string(), ecfg};

    const std::string name = std::string(classify::to_string(ecfg.experiment)) + "_" +
                             std::string(classify::to_string(task)) + "_" +
                             std::string(classify::to_string(ecfg.protocol));
    const fs::path dir = cfg.output_dir / "reports" / name;
    write_text(dir / "runs.csv", classify::runs_csv(cv, ctx));
    write_text(dir / "summary.json", classify::summary_json(cv, ctx));
    for (const auto& r : cv.records) {
      std::ostringstream file;
      file << "seed" << std::setw(2) << std::setfill('0') << r.seed << "_fold" << r.fold << ".csv";
      write_text(dir / "confusion" / file.str(), classify::confusion_csv(r.confusion, cv.class_labels, cfg.hash));
    }
    for (const auto& w : cv.warnings) log << "warning: " << w << '\n';
    const auto s = classify::summarize(cv);
    log << name << ": " << cv.records.size() << " runs, test median " << std::fixed << std::setprecision(2)
        << s.test.median << "% (q1 " << s.test.q1 << ", q3 " << s.test.q3 << "), train median " << s.train.median
        << "% -> " << dir.string() << '\n'
        << std::defaultfloat;
  }
}

void cmd_report(const RunConfig& cfg, std::ostream& out) {
  const fs::path root = cfg.output_dir / "reports";
  if (!fs::is_directory(root)) throw DataError("no reports under " + root.string() + "; run run-experiment first");
  std::vector<fs::path> summaries;
  for (const auto& de : fs::directory_iterator(root)) {
    if (de.is_directory() && fs::exists(de.path() / "summary.json")) summaries.push_back(de.path() / "summary.json");
  }
  std::sort(summaries.begin(), summaries.end());
  if (summaries.empty()) throw DataError("no summary.json files under " + root.string());

  std::ostringstream csv;
  csv << "experiment,task,protocol,phase,count,min,q1,median,q3,max,mean,config_hash\n";
  for (const auto& p : summaries) {
    const auto j = nlohmann::json::parse(read_text(p));
    for (const char* phase : {"train", "test"}) {
      const auto& s = j.at("summary").at(phase);
      csv << j.at("experiment").get<std::string>() << ',' << j.at("task").get<std::string>() << ','
          << j.at("protocol").get<std::string>() << ',' << phase << ',' << s.at("count").get<int>();
      for (const char* k : {"min", "q1", "median", "q3", "max", "mean"}) {
        csv << ',' << std::fixed << std::setprecision(4) << s.at(k).get<double>() << std::defaultfloat;
      }
      csv << ',' << j.at("reproducibility").at("config_hash").get<std::string>() << '\n';
    }
  }
  write_text(root / "summary.csv", csv.str());
  out << csv.str();
}

}  // namespace echoaudio::app
