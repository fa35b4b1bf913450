#include "echoaudio/classify/experiment.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "echoaudio/error.hpp"
#include "echoaudio/esn/random.hpp"
#include "echoaudio/parallel.hpp"

namespace echoaudio::classify {

Experiment parse_experiment(std::string_view name) {
  if (name == "exp1") return Experiment::exp1;
  if (name == "exp2") return Experiment::exp2;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "' (expected exp1 or exp2)");
}

std::string_view to_string(Experiment e) { return e == Experiment::exp1 ? "exp1" : "exp2"; }

Protocol parse_protocol(std::string_view name) {
  if (name == "paper") return Protocol::paper;
  if (name == "holdout") return Protocol::holdout;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "' (expected paper or holdout)");
}

std::string_view to_string(Protocol p) { return p == Protocol::paper ? "paper" : "holdout"; }

void ExperimentConfig::validate() const {
  if (n_folds < 2) throw std::invalid_argument("experiment: n_folds must be >= 2");
  if (n_seeds < 1) throw std::invalid_argument("experiment: n_seeds must be >= 1");
  if (classifier.washout < 0) throw std::invalid_argument("experiment: washout must be >= 0");
  if (!(classifier.ridge_lambda >= 0.0)) throw std::invalid_argument("experiment: ridge_lambda must be >= 0");
  auto esn = classifier.esn;
  esn.input_dim = 1;
  esn.validate();
}

std::vector<int> stratified_folds(const std::vector<std::string>& keys, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw std::invalid_argument("stratified_folds: n_folds must be >= 2");
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < keys.size(); ++i) strata[keys[i]].push_back(i);

  esn::Rng rng(seed);
  std::vector<int> fold(keys.size(), 0);
  int pointer = 0;
  for (auto& [key, members] : strata) {
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.below(i)]);
    }
    for (std::size_t idx : members) {
      fold[idx] = pointer;
      pointer = (pointer + 1) % n_folds;
    }
  }
  return fold;
}

std::string stratum_key(const Utterance& u) { return std::to_string(u.digit) + "\x1f" + u.speaker; }

std::vector<int> folds_for_seed(const std::vector<Utterance>& data, int n_folds, std::uint64_t global_seed, int s) {
  std::vector<std::string> keys;
  keys.reserve(data.size());
  for (const auto& u : data) keys.push_back(stratum_key(u));
  return stratified_folds(keys, n_folds, esn::derive_seed(global_seed, 2 * static_cast<std::uint64_t>(s)));
}

std::uint64_t reservoir_seed(std::uint64_t global_seed, int s) {
  return esn::derive_seed(global_seed, 2 * static_cast<std::uint64_t>(s) + 1);
}

std::vector<std::string> class_labels_for(const std::vector<Utterance>& data, Task task, std::vector<int>* index) {
  std::set<std::string> labels;
  auto label_of = [task](const Utterance& u) { return task == Task::digit ? std::to_string(u.digit) : u.speaker; };
  for (const auto& u : data) labels.insert(label_of(u));
  std::vector<std::string> out(labels.begin(), labels.end());
  if (index) {
    index->clear();
    for (const auto& u : data) {
      index->push_back(static_cast<int>(std::lower_bound(out.begin(), out.end(), label_of(u)) - out.begin()));
    }
  }
  return out;
}

namespace {

struct SeedContext {
  std::vector<int> folds;
  esn::Esn reservoir;
};

}  // namespace

CrossValidation cross_validate(const std::vector<Utterance>& data, const ExperimentConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw EmptyDatasetError("cross_validate: empty dataset");
  const Eigen::Index dim = data.front().features.n_coeffs();
  for (const auto& u : data) {
    if (u.features.n_coeffs() != dim) {
      throw std::invalid_argument("cross_validate: utterance " + u.id + " has a different coefficient count");
    }
  }

  CrossValidation cv;
  std::vector<int> label;
  cv.class_labels = class_labels_for(data, cfg.task, &label);
  const int n_classes = static_cast<int>(cv.class_labels.size());

  // Folds and reservoirs depend only on the seed index, so they are built once
  // per seed and shared across that seed's folds.
  std::vector<SeedContext> seeds(static_cast<std::size_t>(cfg.n_seeds));
  parallel_for(seeds.size(), cfg.jobs, [&](std::size_t k) {
    const int s = static_cast<int>(k) + 1;
    auto& ctx = seeds[k];
    ctx.folds = folds_for_seed(data, cfg.n_folds, cfg.global_seed, s);
    for (int f = 0; f < cfg.n_folds; ++f) {
      std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (ctx.folds[i] == f) seen[static_cast<std::size_t>(label[i])] = true;
      }
      for (int c = 0; c < n_classes; ++c) {
        if (!seen[static_cast<std::size_t>(c)]) {
          throw StratificationError("cross_validate: class '" + cv.class_labels[static_cast<std::size_t>(c)] +
                                    "' absent from fold " + std::to_string(f + 1) + " (seed " + std::to_string(s) +
                                    ")");
        }
      }
    }
    auto esn_cfg = cfg.classifier.esn;
    esn_cfg.input_dim = static_cast<int>(dim);
    esn_cfg.seed = reservoir_seed(cfg.global_seed, s);
    ctx.reservoir = esn::init_reservoir(esn_cfg);
  });

  const std::size_t n_runs = static_cast<std::size_t>(cfg.n_seeds) * static_cast<std::size_t>(cfg.n_folds);
  cv.records.resize(n_runs);
  std::vector<std::vector<std::string>> run_warnings(n_runs);
  parallel_for(n_runs, cfg.jobs, [&](std::size_t r) {
    const int s = static_cast<int>(r / static_cast<std::size_t>(cfg.n_folds)) + 1;
    const int f = static_cast<int>(r % static_cast<std::size_t>(cfg.n_folds));
    const auto& ctx = seeds[static_cast<std::size_t>(s - 1)];

    std::vector<LabeledFeatures> train;
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (ctx.folds[i] != f) {
        train.push_back({&data[i].features, label[i]});
        train_idx.push_back(i);
      }
    }
    std::vector<Eigen::VectorXd> means;
    const auto model = train_classifier(train, cv.class_labels, cfg.task, cfg.classifier, ctx.reservoir,
                                        &run_warnings[r], &means);

    std::vector<int> predicted(data.size(), -1);
    for (std::size_t k = 0; k < train_idx.size(); ++k) {
      predicted[train_idx[k]] = predict_from_mean_state(model, means[k]).label;
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (predicted[i] < 0) predicted[i] = predict(model, data[i].features).label;
    }

    RunRecord rec;
    rec.seed = s;
    rec.fold = f + 1;
    rec.confusion = Eigen::MatrixXi::Zero(n_classes, n_classes);
    std::size_t train_ok = 0, test_ok = 0, test_n = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const bool correct = predicted[i] == label[i];
      const bool in_train = ctx.folds[i] != f;
      if (in_train && correct) ++train_ok;
      if (cfg.protocol == Protocol::paper || !in_train) {
        ++test_n;
        if (correct) ++test_ok;
        ++rec.confusion(label[i], predicted[i]);
      }
    }
    rec.train_accuracy = 100.0 * static_cast<double>(train_ok) / static_cast<double>(train_idx.size());
    rec.test_accuracy = 100.0 * static_cast<double>(test_ok) / static_cast<double>(test_n);
    cv.records[r] = std::move(rec);
  });

  for (std::size_t r = 0; r < n_runs; ++r) {
    for (auto& w : run_warnings[r]) {
      cv.warnings.push_back("seed " + std::to_string(cv.records[r].seed) + " fold " +
                            std::to_string(cv.records[r].fold) + ": " + w);
    }
  }
  return cv;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("summarize: no runs");
  Summary s;
  s.count = values.size();
  s.min = quantile(values, 0.0);
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  s.max = quantile(values, 1.0);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

RunSummary summarize(const CrossValidation& cv) {
  std::vector<double> train, test;
  for (const auto& r : cv.records) {
    train.push_back(r.train_accuracy);
    test.push_back(r.test_accuracy);
  }
  return {summarize(train), summarize(test)};
}

}  // namespace echoaudio::classify
