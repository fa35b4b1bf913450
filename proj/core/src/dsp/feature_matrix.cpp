#include "echoaudio/dsp/feature_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "../binary_io.hpp"
#include "echoaudio/error.hpp"

namespace echoaudio::dsp {

std::string_view to_string(CoeffKind kind) {
  switch (kind) {
    case CoeffKind::mfcc:
      return "mfcc";
    case CoeffKind::td_mfcc:
      return "td_mfcc";
    case CoeffKind::delta:
      return "delta";
  }
  return "unknown";
}

void validate(const FeatureMatrix& features) {
  if (features.n_frames() < 1 || features.n_coeffs() < 1) {
    throw std::invalid_argument("FeatureMatrix: needs at least one coefficient and one frame");
  }
  if (!features.values.allFinite()) throw std::invalid_argument("FeatureMatrix: non-finite value");
}

std::string to_csv(const FeatureMatrix& features) {
  std::string out;
  char buf[32];
  for (Eigen::Index r = 0; r < features.n_coeffs(); ++r) {
    for (Eigen::Index c = 0; c < features.n_frames(); ++c) {
      if (c) out.push_back(',');
      std::snprintf(buf, sizeof buf, "%.9g", features.values(r, c));
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

std::string to_binary(const FeatureMatrix& features) {
  detail::ByteWriter w;
  w.tag("EAFM");
  w.u32(static_cast<std::uint32_t>(features.n_coeffs()));
  w.u32(static_cast<std::uint32_t>(features.n_frames()));
  for (Eigen::Index r = 0; r < features.n_coeffs(); ++r) {
    for (Eigen::Index c = 0; c < features.n_frames(); ++c) w.f64(features.values(r, c));
  }
  return w.take();
}

FeatureMatrix from_binary(std::string_view bytes, CoeffKind kind) {
  detail::ByteReader r(bytes);
  r.expect_tag("EAFM", "feature matrix");
  const auto rows = r.u32();
  const auto cols = r.u32();
  if (r.remaining() != static_cast<std::size_t>(rows) * cols * 8) {
    throw FormatError("feature matrix: payload size does not match dimensions");
  }
  FeatureMatrix f;
  f.coeff_kind = kind;
  f.values.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) f.values(i, j) = r.f64();
  }
  return f;
}

void save_binary(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const auto bytes = to_binary(features);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

FeatureMatrix load_binary(const std::filesystem::path& path, CoeffKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_binary(bytes, kind);
}

ZScore ZScore::fit(const std::vector<const FeatureMatrix*>& training) {
  if (training.empty()) throw std::invalid_argument("ZScore: empty training set");
  const Eigen::Index rows = training.front()->n_coeffs();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(rows);
  double count = 0.0;
  for (const FeatureMatrix* f : training) {
    if (f->n_coeffs() != rows) throw std::invalid_argument("ZScore: coefficient count differs between matrices");
    sum += f->values.rowwise().sum();
    sum_sq += f->values.array().square().rowwise().sum().matrix();
    count += static_cast<double>(f->n_frames());
  }
  ZScore z;
  z.mean = sum / count;
  const Eigen::VectorXd var = (sum_sq / count - z.mean.array().square().matrix()).cwiseMax(0.0);
  z.stddev = var.cwiseSqrt();
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (z.stddev(i) < 1e-12) z.stddev(i) = 1.0;
  }
  return z;
}

Eigen::MatrixXd ZScore::apply(const Eigen::MatrixXd& values) const {
  if (values.rows() != mean.size()) throw std::invalid_argument("ZScore: dimension mismatch");
  return ((values.colwise() - mean).array().colwise() / stddev.array()).matrix();
}

}  // namespace echoaudio::dsp
