#include "echoaudio/classify/classifier.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "echoaudio/error.hpp"

namespace echoaudio::classify {

Task parse_task(std::string_view name) {
  if (name == "digit") return Task::digit;
  if (name == "speaker") return Task::speaker;
  throw std::invalid_argument("unknown task '" + std::string(name) + "' (expected digit or speaker)");
}

std::string_view to_string(Task task) { return task == Task::digit ? "digit" : "speaker"; }

Eigen::MatrixXd encode_targets(int label_index, int n_classes, Eigen::Index n_steps) {
  if (n_classes < 1) throw std::invalid_argument("encode_targets: n_classes must be >= 1");
  if (label_index < 0 || label_index >= n_classes) {
    throw std::invalid_argument("encode_targets: label " + std::to_string(label_index) + " outside [0, " +
                                std::to_string(n_classes) + ")");
  }
  if (n_steps < 1) throw std::invalid_argument("encode_targets: n_steps must be >= 1");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n_classes, n_steps);
  t.row(label_index).setOnes();
  return t;
}

namespace {

esn::StateTrajectory drive(const esn::Esn& esn, const dsp::ZScore& norm, const dsp::FeatureMatrix& features,
                           Eigen::Index washout) {
  if (features.n_coeffs() != esn.input_dim()) {
    throw std::invalid_argument("classifier: features have " + std::to_string(features.n_coeffs()) +
                                " coefficients, reservoir expects " + std::to_string(esn.input_dim()));
  }
  if (features.n_frames() < 1) throw std::invalid_argument("classifier: utterance has no frames");
  const Eigen::Index w = std::min<Eigen::Index>(washout, features.n_frames() - 1);
  return esn::run(esn, norm.apply(features.values), {}, w);
}

}  // namespace

Eigen::VectorXd mean_state(const esn::Esn& esn, const dsp::ZScore& norm, const dsp::FeatureMatrix& features,
                           Eigen::Index washout) {
  return drive(esn, norm, features, washout).usable().rowwise().mean();
}

int argmax_lowest(const Eigen::VectorXd& scores) {
  if (scores.size() == 0) throw std::invalid_argument("argmax: empty score vector");
  int best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = static_cast<int>(i);
  }
  return best;
}

ClassifierModel train_classifier(std::span<const LabeledFeatures> training, std::vector<std::string> class_labels,
                                 Task task, const ClassifierOptions& options, std::uint64_t seed,
                                 std::vector<std::string>* warnings) {
  if (training.empty() || training.front().features == nullptr) {
    throw EmptyDatasetError("train_classifier: no training utterances");
  }
  auto cfg = options.esn;
  cfg.input_dim = static_cast<int>(training.front().features->n_coeffs());
  cfg.seed = seed;
  return train_classifier(training, std::move(class_labels), task, options, esn::init_reservoir(cfg), warnings);
}

ClassifierModel train_classifier(std::span<const LabeledFeatures> training, std::vector<std::string> class_labels,
                                 Task task, const ClassifierOptions& options, esn::Esn reservoir,
                                 std::vector<std::string>* warnings, std::vector<Eigen::VectorXd>* mean_states) {
  if (training.empty()) throw EmptyDatasetError("train_classifier: no training utterances");
  if (options.washout < 0) throw std::invalid_argument("train_classifier: washout must be >= 0");
  const int n_classes = static_cast<int>(class_labels.size());
  if (n_classes < 1) throw std::invalid_argument("train_classifier: no class labels");
  if (std::set<std::string>(class_labels.begin(), class_labels.end()).size() != class_labels.size()) {
    throw std::invalid_argument("train_classifier: class labels are not unique");
  }

  std::vector<const dsp::FeatureMatrix*> mats;
  std::vector<bool> present(static_cast<std::size_t>(n_classes), false);
  for (const auto& item : training) {
    if (item.features == nullptr) throw std::invalid_argument("train_classifier: null feature matrix");
    if (item.label < 0 || item.label >= n_classes) throw std::invalid_argument("train_classifier: label out of range");
    mats.push_back(item.features);
    present[static_cast<std::size_t>(item.label)] = true;
  }
  for (int c = 0; c < n_classes; ++c) {
    if (!present[static_cast<std::size_t>(c)]) {
      throw StratificationError("train_classifier: class '" + class_labels[static_cast<std::size_t>(c)] +
                                "' has no training utterance");
    }
  }

  ClassifierModel model;
  model.feature_normalization = dsp::ZScore::fit(mats);
  model.esn = std::move(reservoir);
  model.class_labels = std::move(class_labels);
  model.task = task;
  model.washout = options.washout;

  esn::RidgeAccumulator acc(model.esn.n_nodes(), n_classes);
  if (mean_states) mean_states->assign(training.size(), Eigen::VectorXd());
  for (std::size_t i = 0; i < training.size(); ++i) {
    const auto& f = *training[i].features;
    const auto traj = drive(model.esn, model.feature_normalization, f, options.washout);
    if (mean_states) (*mean_states)[i] = traj.usable().rowwise().mean();
    if (f.n_frames() < 2) {
      if (warnings) warnings->push_back("skipped single-frame utterance #" + std::to_string(i));
      continue;
    }
    acc.add(traj.usable(), encode_targets(training[i].label, n_classes, traj.usable_columns()));
  }
  if (acc.n_samples() == 0) throw DataError("train_classifier: every utterance was a single frame");
  model.readout = acc.solve(options.ridge_lambda);
  return model;
}

Prediction predict_from_mean_state(const ClassifierModel& model, const Eigen::VectorXd& mean) {
  Prediction p;
  p.scores = esn::apply_readout(model.readout, mean);
  p.label = argmax_lowest(p.scores);
  return p;
}

Prediction predict(const ClassifierModel& model, const dsp::FeatureMatrix& features) {
  return predict_from_mean_state(model, mean_state(model.esn, model.feature_normalization, features, model.washout));
}

}  // namespace echoaudio::classify
