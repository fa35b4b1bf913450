#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace echoaudio::dsp {

enum class CoeffKind { mfcc, td_mfcc, delta };

std::string_view to_string(CoeffKind kind);

/// Coefficients x frames. Shared currency between extractors and classifiers.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  CoeffKind coeff_kind = CoeffKind::mfcc;
  std::vector<double> frame_times_s;  // start time of each frame

  Eigen::Index n_coeffs() const { return values.rows(); }
  Eigen::Index n_frames() const { return values.cols(); }
};

/// Throws std::invalid_argument on empty or non-finite matrices.
void validate(const FeatureMatrix& features);

/// Rows = coefficients, columns = frames, 9 significant digits, no header.
std::string to_csv(const FeatureMatrix& features);

/// "EAFM" | u32 rows | u32 cols | rows*cols f64, row-major, little-endian.
std::string to_binary(const FeatureMatrix& features);
FeatureMatrix from_binary(std::string_view bytes, CoeffKind kind = CoeffKind::mfcc);

void save_binary(const std::filesystem::path& path, const FeatureMatrix& features);
FeatureMatrix load_binary(const std::filesystem::path& path, CoeffKind kind = CoeffKind::mfcc);

/// Per-coefficient z-score statistics (population std; a zero std maps to 1).
struct ZScore {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  static ZScore fit(const std::vector<const FeatureMatrix*>& training);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const;
};

}  // namespace echoaudio::dsp
