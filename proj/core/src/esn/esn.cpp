#include "echoaudio/esn/esn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "echoaudio/error.hpp"
#include "echoaudio/esn/random.hpp"

#include <Eigen/Eigenvalues>

namespace echoaudio::esn {

void EsnConfig::validate() const {
  if (n_nodes < 1) throw std::invalid_argument("EsnConfig: n_nodes must be >= 1");
  if (input_dim < 1) throw std::invalid_argument("EsnConfig: input_dim must be >= 1");
  if (!(connection_prob > 0.0 && connection_prob <= 1.0)) {
    throw std::invalid_argument("EsnConfig: connection_prob must lie in (0, 1]");
  }
  if (!(spectral_radius_target > 0.0 && spectral_radius_target < 1.0)) {
    throw std::invalid_argument("EsnConfig: spectral radius target must lie in (0, 1)");
  }
  if (!(leak_rate > 0.0 && leak_rate <= 1.0)) throw std::invalid_argument("EsnConfig: leak_rate must lie in (0, 1]");
  if (!(input_scale >= 0.0) || !(bias_scale >= 0.0)) {
    throw std::invalid_argument("EsnConfig: input_scale and bias_scale must be >= 0");
  }
}

namespace {

// Subspace width of the block power iteration. Eight vectors are enough to
// separate the outermost eigenvalues of the random reservoirs we build.
constexpr Eigen::Index kPowerBlockSize = 8;

struct Draw {
  Eigen::MatrixXd w_in;
  SparseMatrix w_res;
  Eigen::VectorXd bias;
};

Draw draw_weights(const EsnConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = cfg.n_nodes;
  const Eigen::Index m = cfg.input_dim;

  Draw d;
  d.w_in.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) d.w_in(i, j) = rng.uniform(-cfg.input_scale, cfg.input_scale);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(static_cast<double>(n * n) * cfg.connection_prob * 1.1) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (rng.bernoulli(cfg.connection_prob)) {
        const double v = rng.uniform(-1.0, 1.0);
        if (v != 0.0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
      }
    }
  }
  d.w_res.resize(n, n);
  d.w_res.setFromTriplets(triplets.begin(), triplets.end());
  d.w_res.makeCompressed();

  d.bias.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.bias(i) = rng.uniform(-cfg.bias_scale, cfg.bias_scale);
  return d;
}

}  // namespace

Esn init_reservoir(const EsnConfig& cfg) {
  cfg.validate();
  constexpr int kMaxAttempts = 10;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const std::uint64_t seed = attempt == 0 ? cfg.seed : derive_seed(cfg.seed, static_cast<std::uint64_t>(attempt));
    Draw d = draw_weights(cfg, seed);
    if (d.w_res.nonZeros() == 0) continue;

    const double rho = spectral_radius(d.w_res);
    if (!(rho > 1e-12)) continue;  // nilpotent: cannot be scaled to the target

    Esn esn;
    esn.config = cfg;
    esn.w_in = std::move(d.w_in);
    esn.w_res = d.w_res * (cfg.spectral_radius_target / rho);
    esn.bias = std::move(d.bias);
    return esn;
  }
  throw NumericError("init_reservoir: recurrent matrix came out all-zero or nilpotent " +
                     std::to_string(kMaxAttempts) + " times; raise n_nodes or connection_prob");
}

double spectral_radius(const SparseMatrix& a, const PowerIterationOptions& options) {
  const Eigen::Index n = a.rows();
  if (n < 1 || a.cols() != n) throw std::invalid_argument("spectral_radius: need a square matrix with N >= 1");
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * n);
  const Eigen::Index k = std::min<Eigen::Index>(n, kPowerBlockSize);

  Rng rng(options.seed);
  Eigen::MatrixXd q(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = rng.uniform(-1.0, 1.0);
  }
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, k);

  Eigen::MatrixXd y(n, k);
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    y.noalias() = a * q;
    if (y.norm() == 0.0) return 0.0;

    // Block Rayleigh quotient; its dominant eigenpair approximates A's.
    const Eigen::MatrixXd h = q.transpose() * y;
    const Eigen::EigenSolver<Eigen::MatrixXd> small(h);
    if (small.info() != Eigen::Success) break;
    Eigen::Index top = 0;
    small.eigenvalues().cwiseAbs().maxCoeff(&top);
    const std::complex<double> theta = small.eigenvalues()(top);
    estimate = std::abs(theta);
    if (estimate < 1e-300) return 0.0;

    const Eigen::VectorXcd v = small.eigenvectors().col(top);
    const Eigen::VectorXcd u = q.cast<std::complex<double>>() * v;
    const Eigen::VectorXcd r = y.cast<std::complex<double>>() * v - theta * u;
    if (r.norm() / (estimate * u.norm()) < options.tolerance) return estimate;

    q = Eigen::HouseholderQR<Eigen::MatrixXd>(y).householderQ() * Eigen::MatrixXd::Identity(n, k);
  }
  throw ConvergenceError("spectral_radius: power iteration did not reach tolerance in " +
                             std::to_string(max_iter) + " iterations (last estimate " +
                             std::to_string(estimate) + ")",
                         estimate);
}

void step_into(const Esn& esn, const Eigen::VectorXd& state, const double* input, Eigen::VectorXd& scratch,
               Eigen::VectorXd& out) {
  const double alpha = esn.config.leak_rate;
  scratch.noalias() = esn.w_res * state;
  const Eigen::Index m = esn.w_in.cols();
  for (Eigen::Index j = 0; j < m; ++j) scratch.noalias() += esn.w_in.col(j) * input[j];
  scratch += esn.bias;
  out = (1.0 - alpha) * state + alpha * scratch.array().tanh().matrix();
}

Eigen::VectorXd step(const Esn& esn, const Eigen::VectorXd& state, std::span<const double> input) {
  if (state.size() != esn.n_nodes()) throw std::invalid_argument("step: state size differs from reservoir size");
  if (static_cast<Eigen::Index>(input.size()) != esn.input_dim()) {
    throw std::invalid_argument("step: input size differs from reservoir input_dim");
  }
  Eigen::VectorXd scratch(esn.n_nodes());
  Eigen::VectorXd out(esn.n_nodes());
  step_into(esn, state, input.data(), scratch, out);
  return out;
}

StateTrajectory run(const Esn& esn, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& initial_state,
                    Eigen::Index washout) {
  const Eigen::Index n = esn.n_nodes();
  const Eigen::Index steps = inputs.cols();
  if (inputs.rows() != esn.input_dim()) throw std::invalid_argument("run: input rows differ from input_dim");
  if (washout < 0) throw std::invalid_argument("run: washout must be >= 0");
  if (steps <= washout) {
    throw std::invalid_argument("run: " + std::to_string(steps) + " steps do not exceed washout " +
                                std::to_string(washout));
  }
  if (initial_state.size() != 0 && initial_state.size() != n) {
    throw std::invalid_argument("run: initial state size differs from reservoir size");
  }

  StateTrajectory traj;
  traj.washout_len = washout;
  traj.states.resize(n, steps);
  Eigen::VectorXd prev = initial_state.size() == 0 ? Eigen::VectorXd::Zero(n) : initial_state;
  Eigen::VectorXd scratch(n), next(n);
  // Column-major inputs: one column is contiguous.
  for (Eigen::Index t = 0; t < steps; ++t) {
    step_into(esn, prev, inputs.col(t).data(), scratch, next);
    traj.states.col(t) = next;
    prev.swap(next);
  }
  return traj;
}

}  // namespace echoaudio::esn
