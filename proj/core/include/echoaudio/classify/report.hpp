#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "echoaudio/classify/experiment.hpp"

namespace echoaudio::classify {

struct ReportContext {
  std::string config_hash;
  std::string version;
  ExperimentConfig config;
};

/// "# config_hash: <hash>" line, then
/// experiment,task,protocol,seed,fold,phase,accuracy_pct with a train and a
/// test row per run.
std::string runs_csv(const CrossValidation& cv, const ReportContext& ctx);

/// Quantile summary per phase plus a reproducibility block. No timestamps.
std::string summary_json(const CrossValidation& cv, const ReportContext& ctx);

/// true,predicted,count over every cell of the matrix.
std::string confusion_csv(const Eigen::MatrixXi& confusion, const std::vector<std::string>& labels,
                          const std::string& config_hash);

}  // namespace echoaudio::classify
