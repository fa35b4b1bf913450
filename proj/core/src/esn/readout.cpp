#include "echoaudio/esn/readout.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "echoaudio/error.hpp"

namespace echoaudio::esn {

RidgeAccumulator::RidgeAccumulator(Eigen::Index n_states, Eigen::Index n_outputs, bool intercept)
    : intercept_(intercept) {
  if (n_states < 1 || n_outputs < 1) throw std::invalid_argument("RidgeAccumulator: empty dimensions");
  const Eigen::Index cols = n_states + (intercept ? 1 : 0);
  gram_ = Eigen::MatrixXd::Zero(cols, cols);
  cross_ = Eigen::MatrixXd::Zero(n_outputs, cols);
}

void RidgeAccumulator::add(const Eigen::Ref<const Eigen::MatrixXd>& states,
                           const Eigen::Ref<const Eigen::MatrixXd>& targets) {
  const Eigen::Index n = gram_.rows() - (intercept_ ? 1 : 0);
  if (states.rows() != n || targets.rows() != cross_.rows() || states.cols() != targets.cols()) {
    throw std::invalid_argument("RidgeAccumulator::add: block dimensions do not match");
  }
  if (states.cols() == 0) return;
  gram_.topLeftCorner(n, n).selfadjointView<Eigen::Lower>().rankUpdate(states);
  cross_.leftCols(n).noalias() += targets * states.transpose();
  if (intercept_) {
    gram_.block(n, 0, 1, n) += states.rowwise().sum().transpose();
    gram_(n, n) += static_cast<double>(states.cols());
    cross_.col(n) += targets.rowwise().sum();
  }
  count_ += states.cols();
}

Readout RidgeAccumulator::solve(double ridge_lambda) const {
  if (!(ridge_lambda >= 0.0)) throw std::invalid_argument("ridge: lambda must be >= 0");
  if (count_ == 0) throw std::invalid_argument("ridge: no training samples");

  Eigen::MatrixXd a = gram_.selfadjointView<Eigen::Lower>();
  a.diagonal().array() += ridge_lambda;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-14;
  if (singular && ridge_lambda == 0.0) {
    throw IllConditionedError("ridge: state correlation matrix is singular with lambda = 0; use lambda > 0");
  }
  if (ldlt.info() != Eigen::Success) throw NumericError("ridge: LDL^T factorization failed");

  Readout r;
  r.ridge_lambda = ridge_lambda;
  r.intercept = intercept_;
  r.w_out = ldlt.solve(cross_.transpose()).transpose();
  if (!r.w_out.allFinite()) throw NumericError("ridge: non-finite readout weights");
  return r;
}

Readout train_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double ridge_lambda,
                      bool intercept) {
  if (states.cols() < 1) throw std::invalid_argument("train_readout: need at least one sample");
  if (states.cols() != targets.cols()) throw std::invalid_argument("train_readout: states and targets differ in K");
  RidgeAccumulator acc(states.rows(), targets.rows(), intercept);
  acc.add(states, targets);
  return acc.solve(ridge_lambda);
}

Eigen::MatrixXd apply_readout(const Readout& readout, const Eigen::Ref<const Eigen::MatrixXd>& states) {
  const Eigen::Index n = readout.n_states();
  if (states.rows() != n) {
    throw std::invalid_argument("apply_readout: readout expects " + std::to_string(n) + " states, got " +
                                std::to_string(states.rows()));
  }
  Eigen::MatrixXd y = readout.w_out.leftCols(n) * states;
  if (readout.intercept) y.colwise() += readout.w_out.col(n);
  return y;
}

double nrmse(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) throw std::invalid_argument("nrmse: length mismatch");
  if (target.size() < 2) throw std::invalid_argument("nrmse: need at least two samples");
  const auto n = static_cast<double>(target.size());
  double mean = 0.0;
  for (double t : target) mean += t;
  mean /= n;
  double var = 0.0;
  double mse = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    var += (target[i] - mean) * (target[i] - mean);
    mse += (prediction[i] - target[i]) * (prediction[i] - target[i]);
  }
  var /= n;
  mse /= n;
  if (!(var > 0.0)) throw UndefinedNormalizationError("nrmse: target is constant, standard deviation is zero");
  return std::sqrt(mse) / std::sqrt(var);
}

}  // namespace echoaudio::esn
