#include "echoaudio/classify/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace echoaudio::classify {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

nlohmann::ordered_json summary_block(const Summary& s) {
  return {{"count", s.count}, {"min", s.min},  {"q1", s.q1},     {"median", s.median},
          {"q3", s.q3},       {"max", s.max},  {"mean", s.mean}};
}

}  // namespace

std::string runs_csv(const CrossValidation& cv, const ReportContext& ctx) {
  std::ostringstream os;
  os << "# config_hash: " << ctx.config_hash << '\n';
  os << "experiment,task,protocol,seed,fold,phase,accuracy_pct\n";
  const auto e = to_string(ctx.config.experiment);
  const auto t = to_string(ctx.config.task);
  const auto p = to_string(ctx.config.protocol);
  for (const auto& r : cv.records) {
    os << e << ',' << t << ',' << p << ',' << r.seed << ',' << r.fold << ",train," << fixed(r.train_accuracy) << '\n';
    os << e << ',' << t << ',' << p << ',' << r.seed << ',' << r.fold << ",test," << fixed(r.test_accuracy) << '\n';
  }
  return os.str();
}

std::string summary_json(const CrossValidation& cv, const ReportContext& ctx) {
  const auto stats = summarize(cv);
  const auto& c = ctx.config;
  nlohmann::ordered_json j;
  j["experiment"] = to_string(c.experiment);
  j["task"] = to_string(c.task);
  j["protocol"] = to_string(c.protocol);
  j["n_runs"] = cv.records.size();
  j["class_labels"] = cv.class_labels;
  j["quantile_method"] = "linear interpolation at p*(n-1) of the sorted sample";
  j["summary"] = {{"train", summary_block(stats.train)}, {"test", summary_block(stats.test)}};
  std::vector<std::uint64_t> reservoir_seeds;
  for (int s = 1; s <= c.n_seeds; ++s) reservoir_seeds.push_back(reservoir_seed(c.global_seed, s));
  j["reproducibility"] = {{"config_hash", ctx.config_hash},
                          {"global_seed", c.global_seed},
                          {"n_seeds", c.n_seeds},
                          {"n_folds", c.n_folds},
                          {"reservoir_seeds", reservoir_seeds},
                          {"version", ctx.version}};
  j["warnings"] = cv.warnings.size();
  return j.dump(2) + "\n";
}

std::string confusion_csv(const Eigen::MatrixXi& confusion, const std::vector<std::string>& labels,
                          const std::string& config_hash) {
  std::ostringstream os;
  os << "# config_hash: " << config_hash << '\n';
  os << "true,predicted,count\n";
  for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
    for (Eigen::Index k = 0; k < confusion.cols(); ++k) {
      os << labels[static_cast<std::size_t>(i)] << ',' << labels[static_cast<std::size_t>(k)] << ','
         << confusion(i, k) << '\n';
    }
  }
  return os.str();
}

}  // namespace echoaudio::classify
