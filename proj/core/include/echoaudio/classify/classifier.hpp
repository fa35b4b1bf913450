#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "echoaudio/dsp/feature_matrix.hpp"
#include "echoaudio/esn/esn.hpp"
#include "echoaudio/esn/readout.hpp"

namespace echoaudio::classify {

enum class Task { digit, speaker };

Task parse_task(std::string_view name);
std::string_view to_string(Task task);

/// One-hot teacher: row `label_index` is 1 for all n_steps columns.
Eigen::MatrixXd encode_targets(int label_index, int n_classes, Eigen::Index n_steps);

/// Feature matrix plus its class index into the model's label list.
struct LabeledFeatures {
  const dsp::FeatureMatrix* features = nullptr;
  int label = 0;
};

struct ClassifierOptions {
  esn::EsnConfig esn = default_esn();  // input_dim is taken from the features
  Eigen::Index washout = 50;
  double ridge_lambda = 0.1;

  static esn::EsnConfig default_esn() {
    esn::EsnConfig c;
    c.n_nodes = 400;
    c.connection_prob = 0.2;
    c.leak_rate = 0.3;
    c.input_scale = 0.1;  // z-scored MFCCs; larger scales saturate tanh
    return c;
  }
};

struct ClassifierModel {
  esn::Esn esn;
  esn::Readout readout;
  std::vector<std::string> class_labels;
  dsp::ZScore feature_normalization;
  Task task = Task::digit;
  Eigen::Index washout = 50;

  int n_classes() const { return static_cast<int>(class_labels.size()); }
};

struct Prediction {
  int label = 0;
  Eigen::VectorXd scores;  // time-averaged readout outputs
};

/// Drives the reservoir through the z-scored frames of one utterance from the
/// zero state and returns the mean state over the post-washout frames, where
/// the washout is min(washout, n_frames - 1).
Eigen::VectorXd mean_state(const esn::Esn& esn, const dsp::ZScore& norm, const dsp::FeatureMatrix& features,
                           Eigen::Index washout);

/// Argmax with the lowest index winning ties.
int argmax_lowest(const Eigen::VectorXd& scores);

/// Builds the reservoir from options.esn with `seed` and the features'
/// coefficient count as input_dim, then trains on it.
ClassifierModel train_classifier(std::span<const LabeledFeatures> training, std::vector<std::string> class_labels,
                                 Task task, const ClassifierOptions& options, std::uint64_t seed,
                                 std::vector<std::string>* warnings = nullptr);

/// Trains a readout for an existing reservoir. Single-frame utterances are
/// skipped and reported in `warnings`. If `mean_states` is given it receives
/// the post-washout mean state of every training item, for reuse in scoring.
ClassifierModel train_classifier(std::span<const LabeledFeatures> training, std::vector<std::string> class_labels,
                                 Task task, const ClassifierOptions& options, esn::Esn reservoir,
                                 std::vector<std::string>* warnings = nullptr,
                                 std::vector<Eigen::VectorXd>* mean_states = nullptr);

/// Readout applied to every post-washout state and averaged; since the
/// readout is affine this is evaluated as the readout of the mean state.
Prediction predict(const ClassifierModel& model, const dsp::FeatureMatrix& features);
Prediction predict_from_mean_state(const ClassifierModel& model, const Eigen::VectorXd& mean);

}  // namespace echoaudio::classify
