#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "../app/commands.hpp"
#include "../app/run_config.hpp"
#include "echoaudio/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::string output_dir;
  int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "JSON run config (defaults are used for missing keys)");
  cmd->add_option("-s,--set", f.sets, "override a config leaf, e.g. --set experiment.n_seeds=3")->take_all();
  cmd->add_option("-o,--output-dir", f.output_dir, "shorthand for --set output_dir=...");
  cmd->add_option("-j,--jobs", f.jobs, "worker threads (shorthand for --set jobs=...)")->check(CLI::PositiveNumber);
}

echoaudio::app::RunConfig resolve(const CommonFlags& f, bool require_dataset = true) {
  auto sets = f.sets;
  if (!f.output_dir.empty()) sets.push_back("output_dir=" + f.output_dir);
  if (f.jobs > 0) sets.push_back("jobs=" + std::to_string(f.jobs));
  return echoaudio::app::load_run_config(f.config, sets, echoaudio::app::prefixed_environment(), require_dataset);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace echoaudio;
  CLI::App app{"echoaudio: spoken digit and speaker recognition with echo state networks"};
  app.set_version_flag("--version", app::version_string());
  app.require_subcommand(1);

  CommonFlags manifest_f, extract_f, train_f, run_f, report_f, show_f;
  std::string mode_name = "reference";

  auto* manifest = app.add_subcommand("manifest", "scan dataset.root and write manifest.csv/json");
  add_common(manifest, manifest_f);
  auto* extract = app.add_subcommand("extract", "write one feature matrix per clip plus index.csv");
  add_common(extract, extract_f);
  extract->add_option("-m,--mode", mode_name, "reference | td_direct | td_reservoir")
      ->check(CLI::IsMember({"reference", "td_direct", "td_reservoir"}));
  auto* train = app.add_subcommand("train-extractor", "train the convolution-mimicking reservoir");
  add_common(train, train_f);
  auto* run = app.add_subcommand("run-experiment", "cross-validate the classifier and write reports");
  add_common(run, run_f);
  auto* report = app.add_subcommand("report", "collect every summary.json into reports/summary.csv");
  add_common(report, report_f);
  auto* show = app.add_subcommand("show-config", "print the resolved config tree and its hash");
  add_common(show, show_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*manifest) {
      app::cmd_manifest(resolve(manifest_f), std::cerr);
    } else if (*extract) {
      const auto mode = app::parse_feature_mode(mode_name);
      app::cmd_extract(resolve(extract_f), mode, std::cerr);
    } else if (*train) {
      app::cmd_train_extractor(resolve(train_f), std::cerr);
    } else if (*run) {
      app::cmd_run_experiment(resolve(run_f), std::cerr);
    } else if (*report) {
      app::cmd_report(resolve(report_f, false), std::cout);
    } else if (*show) {
      const auto cfg = resolve(show_f, false);
      std::cout << cfg.tree.dump(2) << "\nconfig_hash: " << cfg.hash << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
