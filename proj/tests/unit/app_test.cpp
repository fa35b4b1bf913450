#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "app/commands.hpp"
#include "app/run_config.hpp"
#include "echoaudio/error.hpp"
#include "echoaudio/parallel.hpp"
#include "synth/synth_corpus.hpp"
#include "test_support.hpp"

using namespace echoaudio;
using namespace echoaudio::app;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ECHOAUDIO_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> index_ids(const fs::path& index) {
  std::istringstream in(slurp(index));
  std::string line;
  std::vector<std::string> ids;
  std::getline(in, line);  // hash
  std::getline(in, line);  // header
  while (std::getline(in, line)) ids.push_back(line.substr(0, line.find(',')));
  return ids;
}

}  // namespace

TEST(Config, DefaultsResolveWithoutDataset) {
  const auto cfg = resolve(default_tree(), false);
  EXPECT_EQ(cfg.mel.n_filters, 25);
  EXPECT_EQ(cfg.td.n_channels, 10);
  EXPECT_EQ(cfg.esn1.n_nodes, 35);
  EXPECT_EQ(cfg.experiment.classifier.esn.n_nodes, 400);
  EXPECT_EQ(cfg.experiment.classifier.washout, 50);
  EXPECT_EQ(cfg.experiment.n_folds, 5);
  EXPECT_EQ(cfg.experiment.n_seeds, 10);
  EXPECT_EQ(cfg.hash.size(), 16u);
  EXPECT_EQ(default_tree()["schema_version"], kSchemaVersion);
  EXPECT_THROW(resolve(default_tree(), true), ConfigError);  // dataset.root unset
}

TEST(Config, MergeIsStrict) {
  auto tree = default_tree();
  merge_tree(tree, json::parse(R"({"experiment": {"n_seeds": 3}, "mel": {"n_filters": 20}})"), "test");
  EXPECT_EQ(tree["experiment"]["n_seeds"], 3);
  EXPECT_EQ(tree["experiment"]["n_folds"], 5);
  EXPECT_THROW(merge_tree(tree, json::parse(R"({"experiment": {"n_sedes": 3}})"), "test"), ConfigError);
  EXPECT_THROW(merge_tree(tree, json::parse(R"({"experiment": {"n_seeds": "three"}})"), "test"), ConfigError);
  EXPECT_THROW(merge_tree(tree, json::parse(R"({"mel": 4})"), "test"), ConfigError);
}

TEST(Config, SetAndEnvOverrides) {
  auto tree = default_tree();
  apply_set(tree, "experiment.protocol=paper");
  apply_set(tree, "esn2.n_nodes=50");
  apply_set(tree, "experiment.tasks=[\"speaker\"]");
  apply_env(tree, {{"ECHOAUDIO_TD__N_CHANNELS", "6"}, {"ECHOAUDIO_GLOBAL_SEED", "9"}});
  const auto cfg = resolve(tree, false);
  EXPECT_EQ(cfg.experiment.protocol, classify::Protocol::paper);
  EXPECT_EQ(cfg.experiment.classifier.esn.n_nodes, 50);
  ASSERT_EQ(cfg.tasks.size(), 1u);
  EXPECT_EQ(cfg.tasks[0], classify::Task::speaker);
  EXPECT_EQ(cfg.td.n_channels, 6);
  EXPECT_EQ(cfg.global_seed, 9u);
  EXPECT_THROW(apply_set(tree, "nope.x=1"), ConfigError);
  EXPECT_THROW(apply_set(tree, "experiment=1"), ConfigError);
  EXPECT_THROW(apply_set(tree, "no_equals"), ConfigError);
  EXPECT_THROW(apply_env(tree, {{"ECHOAUDIO_BOGUS", "1"}}), ConfigError);
  apply_set(tree, "experiment.protocol=sideways");
  EXPECT_THROW(resolve(tree, false), ConfigError);
}

TEST(Config, HashIgnoresOutputDirAndJobsOnly) {
  auto a = default_tree();
  auto b = default_tree();
  apply_set(b, "output_dir=elsewhere");
  apply_set(b, "jobs=4");
  EXPECT_EQ(config_hash(a), config_hash(b));
  apply_set(b, "global_seed=2");
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, FileThenEnvThenSet) {
  echoaudio::testing::TempDir dir("cfg");
  {
    std::ofstream f(dir.path() / "c.json");
    f << R"({"experiment": {"n_seeds": 4, "n_folds": 3}, "global_seed": 5})";
  }
  const auto cfg = load_run_config(dir.path() / "c.json", {"experiment.n_seeds=6"},
                                   {{"ECHOAUDIO_EXPERIMENT__N_SEEDS", "5"}, {"ECHOAUDIO_GLOBAL_SEED", "7"}}, false);
  EXPECT_EQ(cfg.experiment.n_seeds, 6);
  EXPECT_EQ(cfg.experiment.n_folds, 3);
  EXPECT_EQ(cfg.global_seed, 7u);
  {
    std::ofstream f(dir.path() / "bad.json");
    f << "{ not json";
  }
  EXPECT_THROW(load_run_config(dir.path() / "bad.json", {}, {}, false), ConfigError);
  EXPECT_THROW(load_run_config(dir.path() / "missing.json", {}, {}, false), ConfigError);
}

TEST(Parallel, CoversEveryIndexAndRethrowsLowest) {
  for (int jobs : {1, 4}) {
    std::vector<int> hit(100, 0);
    parallel_for(hit.size(), jobs, [&](std::size_t i) { hit[i] += 1; });
    EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 100);
    try {
      parallel_for(50, jobs, [](std::size_t i) {
        if (i == 17 || i == 31) throw std::runtime_error("fail " + std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "fail 17");
    }
  }
}

TEST(Cli, ExitCodes) {
  echoaudio::testing::TempDir dir("cli");
  const auto log = dir.path() / "log.txt";
  EXPECT_EQ(run_cli("show-config", log), 0);
  EXPECT_NE(slurp(log).find("config_hash"), std::string::npos);
  EXPECT_EQ(run_cli("show-config --set experiment.bogus=1", log), 2);
  EXPECT_EQ(run_cli("frobnicate", log), 2);
  EXPECT_EQ(run_cli("manifest", log), 2);  // no dataset.root
  EXPECT_EQ(run_cli("manifest --set dataset.root=/nonexistent/x", log), 2);
  fs::create_directories(dir.path() / "empty");
  EXPECT_EQ(run_cli("manifest --set dataset.root=" + (dir.path() / "empty").string() + " -o " +
                        (dir.path() / "out").string(),
                    log),
            3);
  EXPECT_EQ(run_cli("report -o " + (dir.path() / "out").string(), log), 3);
}

TEST(Cli, SmokePipelineIsDeterministicAndFast) {
  const auto start = std::chrono::steady_clock::now();
  echoaudio::testing::TempDir dir("smoke");
  synth::CorpusSpec spec;
  spec.n_speakers = 2;
  spec.digits = {3, 7};
  spec.n_takes = 5;
  ASSERT_EQ(synth::write_corpus(dir.path() / "data", spec), 20u);

  const auto out = dir.path() / "out";
  const std::string common = "--set dataset.root=" + (dir.path() / "data").string() +
                             " --set experiment.n_seeds=2 --set esn2.n_nodes=100 --set experiment.washout=10"
                             " --set td.train_clips=12 --set td.eval_clips=4 -o " + out.string();
  const auto log = dir.path() / "log.txt";
  ASSERT_EQ(run_cli("manifest " + common, log), 0) << slurp(log);
  ASSERT_EQ(run_cli("extract --mode reference " + common, log), 0) << slurp(log);
  ASSERT_EQ(run_cli("extract --mode td_direct " + common, log), 0) << slurp(log);
  EXPECT_EQ(run_cli("extract --mode td_reservoir " + common, log), 3);
  EXPECT_NE(slurp(log).find("train-extractor"), std::string::npos);

  const auto ref_ids = index_ids(out / "features" / "reference" / "index.csv");
  EXPECT_EQ(ref_ids.size(), 20u);
  EXPECT_EQ(ref_ids, index_ids(out / "features" / "td_direct" / "index.csv"));
  for (const auto& id : ref_ids) {
    const auto r = dsp::load_binary(out / "features" / "reference" / (id + ".eafm"));
    const auto t = dsp::load_binary(out / "features" / "td_direct" / (id + ".eafm"));
    EXPECT_EQ(r.n_coeffs(), 14);
    EXPECT_EQ(t.n_coeffs(), 10);
    EXPECT_EQ(r.n_frames(), t.n_frames()) << id;
  }

  ASSERT_EQ(run_cli("train-extractor " + common, log), 0) << slurp(log);
  const auto artifact = slurp(out / "extractor" / "extractor.eafx");
  const auto metrics = json::parse(slurp(out / "extractor" / "extractor.metrics.json"));
  ASSERT_EQ(metrics["training_nrmse"].size(), 10u);
  for (const auto& v : metrics["training_nrmse"]) EXPECT_TRUE(std::isfinite(v.get<double>()));
  ASSERT_EQ(run_cli("train-extractor " + common, log), 0);
  EXPECT_EQ(slurp(out / "extractor" / "extractor.eafx"), artifact);
  ASSERT_EQ(run_cli("extract --mode td_reservoir " + common, log), 0) << slurp(log);

  ASSERT_EQ(run_cli("run-experiment " + common, log), 0) << slurp(log);
  const auto dir1 = out / "reports" / "exp1_digit_holdout";
  const auto runs = slurp(dir1 / "runs.csv");
  const auto summary = slurp(dir1 / "summary.json");
  EXPECT_EQ(std::count(runs.begin(), runs.end(), '\n'), 2 + 2 * 10);
  ASSERT_EQ(run_cli("run-experiment -j 2 " + common, log), 0);
  EXPECT_EQ(slurp(dir1 / "runs.csv"), runs);
  EXPECT_EQ(slurp(dir1 / "summary.json"), summary);

  ASSERT_EQ(run_cli("run-experiment --set experiment.experiment=exp2 " + common, log), 0) << slurp(log);
  const auto hash_line = runs.substr(0, runs.find('\n'));
  EXPECT_EQ(hash_line.rfind("# config_hash: ", 0), 0u);
  EXPECT_NE(slurp(out / "reports" / "exp2_digit_holdout" / "runs.csv").substr(0, hash_line.size()), hash_line);

  ASSERT_EQ(run_cli("report " + common, log), 0);
  EXPECT_NE(slurp(log).find("exp2,speaker,holdout,test"), std::string::npos);

  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 60.0);
}

TEST(Commands, SubsetAndClipIds) {
  echoaudio::testing::TempDir dir("subset");
  synth::CorpusSpec spec;
  spec.n_speakers = 3;
  spec.digits = {1, 2, 3};
  spec.n_takes = 3;
  synth::write_corpus(dir.path(), spec);
  auto tree = default_tree();
  tree["dataset"]["root"] = dir.path().string();
  tree["dataset"]["digits"] = {1, 3};
  tree["dataset"]["max_per_key"] = 2;
  const auto voices = synth::make_voices(3, spec.seed);
  tree["dataset"]["speakers"] = {voices[0].name};
  const auto m = dataset_subset(resolve(tree));
  ASSERT_EQ(m.entries.size(), 4u);
  for (const auto& e : m.entries) {
    EXPECT_NE(e.digit_label, 2);
    EXPECT_EQ(e.speaker_label, voices[0].name);
  }
  audio::ManifestEntry e{"sub/1_x_0.wav", 1, "x"};
  EXPECT_EQ(clip_id(e), "sub_1_x_0");
  EXPECT_EQ(parse_feature_mode("td_direct"), FeatureMode::td_direct);
  EXPECT_THROW(parse_feature_mode("wavelet"), ConfigError);
}
