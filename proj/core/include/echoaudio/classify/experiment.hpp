#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "echoaudio/classify/classifier.hpp"
#include "echoaudio/dsp/feature_matrix.hpp"

namespace echoaudio::classify {

enum class Experiment { exp1, exp2 };  // reference MFCC vs time-domain features
enum class Protocol { paper, holdout };

Experiment parse_experiment(std::string_view name);
std::string_view to_string(Experiment e);
Protocol parse_protocol(std::string_view name);
std::string_view to_string(Protocol p);

struct ExperimentConfig {
  Experiment experiment = Experiment::exp1;
  Task task = Task::digit;
  Protocol protocol = Protocol::holdout;
  int n_folds = 5;
  int n_seeds = 10;
  ClassifierOptions classifier;
  std::uint64_t global_seed = 1;
  int jobs = 1;

  void validate() const;
};

struct Utterance {
  std::string id;
  int digit = 0;
  std::string speaker;
  dsp::FeatureMatrix features;
};

/// Fold index per item. Items are grouped into strata by `keys`, strata are
/// visited in ascending key order, each stratum is shuffled and then dealt
/// round-robin with one pointer that carries over between strata. Per-fold
/// counts of any stratum, and of any union of adjacent strata, differ by at
/// most one.
std::vector<int> stratified_folds(const std::vector<std::string>& keys, int n_folds, std::uint64_t seed);

/// Stratum key used for both tasks: digit first, then speaker.
std::string stratum_key(const Utterance& u);

/// Fold assignment for seed s (1-based); depends only on the dataset keys and
/// the global seed, so Exp 1 and Exp 2 share folds.
std::vector<int> folds_for_seed(const std::vector<Utterance>& data, int n_folds, std::uint64_t global_seed, int s);
std::uint64_t reservoir_seed(std::uint64_t global_seed, int s);

struct RunRecord {
  int seed = 0;  // 1-based
  int fold = 0;  // 1-based, the partition left out of training
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  Eigen::MatrixXi confusion;  // test phase, rows = true class
};

struct CrossValidation {
  std::vector<std::string> class_labels;
  std::vector<RunRecord> records;  // ordered by (seed, fold)
  std::vector<std::string> warnings;
};

/// Class labels of `data` for `task` in sorted order, with the index of each item.
std::vector<std::string> class_labels_for(const std::vector<Utterance>& data, Task task, std::vector<int>* index);

/// Throws StratificationError naming (seed, fold) if a class is absent from a fold.
CrossValidation cross_validate(const std::vector<Utterance>& data, const ExperimentConfig& cfg);

/// Linear interpolation between closest ranks: position p * (n - 1) in the
/// sorted sample.
double quantile(std::vector<double> values, double p);

struct Summary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
  std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

struct RunSummary {
  Summary train;
  Summary test;
};

RunSummary summarize(const CrossValidation& cv);

}  // namespace echoaudio::classify
