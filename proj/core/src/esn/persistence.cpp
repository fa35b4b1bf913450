#include "echoaudio/esn/persistence.hpp"

#include <string>
#include <vector>

#include "../binary_io.hpp"
#include "echoaudio/error.hpp"
#include "json.hpp"

namespace echoaudio::esn {

std::string encode_earc(const Esn& esn, const Readout* readout) {
  detail::ByteWriter w;
  w.tag("EARC");
  w.u32(kEarcVersion);

  const auto& c = esn.config;
  w.u32(static_cast<std::uint32_t>(esn.n_nodes()));
  w.u32(static_cast<std::uint32_t>(esn.input_dim()));
  w.f64(c.connection_prob);
  w.f64(c.spectral_radius_target);
  w.f64(c.leak_rate);
  w.f64(c.input_scale);
  w.f64(c.bias_scale);
  w.u64(c.seed);

  for (Eigen::Index i = 0; i < esn.w_in.rows(); ++i) {
    for (Eigen::Index j = 0; j < esn.w_in.cols(); ++j) w.f64(esn.w_in(i, j));
  }

  w.u64(static_cast<std::uint64_t>(esn.w_res.nonZeros()));
  for (Eigen::Index r = 0; r < esn.w_res.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(esn.w_res, r); it; ++it) {
      w.u32(static_cast<std::uint32_t>(it.row()));
      w.u32(static_cast<std::uint32_t>(it.col()));
      w.f64(it.value());
    }
  }

  for (Eigen::Index i = 0; i < esn.bias.size(); ++i) w.f64(esn.bias(i));

  w.u8(readout ? 1 : 0);
  if (readout) {
    w.u32(static_cast<std::uint32_t>(readout->w_out.rows()));
    w.u32(static_cast<std::uint32_t>(readout->w_out.cols()));
    w.u8(readout->intercept ? 1 : 0);
    w.f64(readout->ridge_lambda);
    for (Eigen::Index i = 0; i < readout->w_out.rows(); ++i) {
      for (Eigen::Index j = 0; j < readout->w_out.cols(); ++j) w.f64(readout->w_out(i, j));
    }
  }
  return w.take();
}

DecodedReservoir decode_earc(std::string_view bytes) {
  detail::ByteReader r(bytes);
  r.expect_tag("EARC", "reservoir container");
  const auto version = r.u32();
  if (version != kEarcVersion) {
    throw UnsupportedFormatError("reservoir container: version " + std::to_string(version) + " not supported");
  }

  DecodedReservoir out;
  Esn& esn = out.esn;
  auto& c = esn.config;
  const auto n = r.u32();
  const auto m = r.u32();
  c.n_nodes = static_cast<int>(n);
  c.input_dim = static_cast<int>(m);
  c.connection_prob = r.f64();
  c.spectral_radius_target = r.f64();
  c.leak_rate = r.f64();
  c.input_scale = r.f64();
  c.bias_scale = r.f64();
  c.seed = r.u64();

  esn.w_in.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) esn.w_in(i, j) = r.f64();
  }

  const auto nnz = r.u64();
  if (nnz > static_cast<std::uint64_t>(n) * n) throw FormatError("reservoir container: nnz exceeds N*N");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nnz);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    const auto row = r.u32();
    const auto col = r.u32();
    const double v = r.f64();
    if (row >= n || col >= n) throw FormatError("reservoir container: sparse index out of range");
    triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  }
  esn.w_res.resize(n, n);
  esn.w_res.setFromTriplets(triplets.begin(), triplets.end());
  esn.w_res.makeCompressed();

  esn.bias.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) esn.bias(i) = r.f64();

  if (r.u8() != 0) {
    Readout ro;
    const auto rows = r.u32();
    const auto cols = r.u32();
    ro.intercept = r.u8() != 0;
    ro.ridge_lambda = r.f64();
    if (cols != n + (ro.intercept ? 1u : 0u)) throw FormatError("reservoir container: readout width mismatch");
    ro.w_out.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) ro.w_out(i, j) = r.f64();
    }
    out.readout = std::move(ro);
  }
  out.bytes_consumed = bytes.size() - r.remaining();
  return out;
}

std::string config_to_json(const EsnConfig& cfg) {
  const nlohmann::json j = {{"n_nodes", cfg.n_nodes},
                            {"input_dim", cfg.input_dim},
                            {"connection_prob", cfg.connection_prob},
                            {"spectral_radius_target", cfg.spectral_radius_target},
                            {"leak_rate", cfg.leak_rate},
                            {"input_scale", cfg.input_scale},
                            {"bias_scale", cfg.bias_scale},
                            {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

EsnConfig config_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json);
  EsnConfig c;
  c.n_nodes = j.value("n_nodes", c.n_nodes);
  c.input_dim = j.value("input_dim", c.input_dim);
  c.connection_prob = j.value("connection_prob", c.connection_prob);
  c.spectral_radius_target = j.value("spectral_radius_target", c.spectral_radius_target);
  c.leak_rate = j.value("leak_rate", c.leak_rate);
  c.input_scale = j.value("input_scale", c.input_scale);
  c.bias_scale = j.value("bias_scale", c.bias_scale);
  c.seed = j.value("seed", c.seed);
  return c;
}

}  // namespace echoaudio::esn
