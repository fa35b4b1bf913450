#pragma once

#include <span>

#include <Eigen/Dense>

namespace echoaudio::esn {

inline constexpr double kDefaultRidgeLambda = 1e-6;

/// Linear readout y = W_out [x; 1]. The trailing column is the intercept and
/// is present only when `intercept` is set.
struct Readout {
  Eigen::MatrixXd w_out;  // P x (N + intercept)
  double ridge_lambda = kDefaultRidgeLambda;
  bool intercept = true;

  Eigen::Index n_outputs() const { return w_out.rows(); }
  Eigen::Index n_states() const { return w_out.cols() - (intercept ? 1 : 0); }
};

/// Streams (states, targets) blocks into the normal equations so that long
/// concatenations never have to be materialized.
class RidgeAccumulator {
 public:
  RidgeAccumulator(Eigen::Index n_states, Eigen::Index n_outputs, bool intercept = true);

  /// states: N x K, targets: P x K.
  void add(const Eigen::Ref<const Eigen::MatrixXd>& states, const Eigen::Ref<const Eigen::MatrixXd>& targets);

  /// Solves W (S S^T + lambda I) = T S^T with an LDL^T factorization.
  /// Throws IllConditionedError if the system is singular.
  Readout solve(double ridge_lambda) const;

  Eigen::Index n_samples() const { return count_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& cross() const { return cross_; }

 private:
  Eigen::MatrixXd gram_;   // (N + i) x (N + i), lower triangle accumulated
  Eigen::MatrixXd cross_;  // P x (N + i)
  Eigen::Index count_ = 0;
  bool intercept_;
};

/// Ridge regression readout from states (N x K) and targets (P x K).
Readout train_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets,
                      double ridge_lambda = kDefaultRidgeLambda, bool intercept = true);

/// W_out x for every column of states (N x T); returns P x T.
Eigen::MatrixXd apply_readout(const Readout& readout, const Eigen::Ref<const Eigen::MatrixXd>& states);

/// sqrt(mean((p - t)^2)) / std(t), population standard deviation.
/// Throws UndefinedNormalizationError for a constant target.
double nrmse(std::span<const double> prediction, std::span<const double> target);

}  // namespace echoaudio::esn
