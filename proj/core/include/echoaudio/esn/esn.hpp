#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace echoaudio::esn {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct EsnConfig {
  int n_nodes = 400;
  int input_dim = 1;
  double connection_prob = 0.2;  // "80% sparsity"
  double spectral_radius_target = 0.95;
  double leak_rate = 0.3;
  double input_scale = 0.5;
  double bias_scale = 0.0;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument if any field is outside its range.
  void validate() const;
};

/// Fixed random reservoir. Immutable after init_reservoir().
struct Esn {
  Eigen::MatrixXd w_in;   // N x M, dense
  SparseMatrix w_res;     // N x N
  Eigen::VectorXd bias;   // N
  EsnConfig config;

  Eigen::Index n_nodes() const { return w_res.rows(); }
  Eigen::Index input_dim() const { return w_in.cols(); }
};

/// Post-update states x(1) .. x(T), one column per step.
struct StateTrajectory {
  Eigen::MatrixXd states;  // N x T
  Eigen::Index washout_len = 0;

  Eigen::Index usable_columns() const { return states.cols() - washout_len; }
  auto usable() const { return states.rightCols(usable_columns()); }
};

/// Draws w_in (row-major), then the w_res mask and values (row-major), then
/// the bias, from one Rng seeded with cfg.seed. w_res is rescaled to the
/// target spectral radius. An all-zero or nilpotent draw is retried with a
/// derived sub-seed, at most 10 times.
Esn init_reservoir(const EsnConfig& cfg);

struct PowerIterationOptions {
  double tolerance = 1e-6;
  int max_iterations = 0;  // 0 -> 10 * N
  std::uint64_t seed = 0x5eed;
};

/// Largest |eigenvalue| by block power iteration from a random start: an
/// orthonormal block of 8 vectors is pushed through the matrix and the
/// dominant eigenvalue of its Rayleigh quotient Q^T A Q is tracked. Unlike the
/// single-vector form this converges when the dominant eigenvalues are a
/// complex pair, as they usually are for random non-symmetric reservoirs.
/// Stops once the Ritz residual drops below `tolerance` (relative); throws
/// ConvergenceError carrying the last estimate otherwise.
double spectral_radius(const SparseMatrix& matrix, const PowerIterationOptions& options = {});

/// x' = (1 - a) x + a tanh(W_res x + W_in u + b). With a = 1 this is the
/// plain echo state update.
Eigen::VectorXd step(const Esn& esn, const Eigen::VectorXd& state, std::span<const double> input);

/// Allocation-free form of step(); `out` must not alias `state`.
void step_into(const Esn& esn, const Eigen::VectorXd& state, const double* input, Eigen::VectorXd& scratch,
               Eigen::VectorXd& out);

/// Runs the reservoir over inputs (M x T). `initial_state` may be empty for
/// the zero state. Throws std::invalid_argument when T <= washout.
StateTrajectory run(const Esn& esn, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& initial_state,
                    Eigen::Index washout);

}  // namespace echoaudio::esn
