#pragma once

#include <stdexcept>
#include <string>

namespace echoaudio {

// Exceptions are grouped by what the caller can do about them. The CLI maps
// ConfigError -> exit 2, DataError -> exit 3, NumericError -> exit 4.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed RIFF/WAVE container.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// Well-formed container holding a codec or layout we do not decode.
class UnsupportedFormatError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyAudioError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyDatasetError : public DataError {
 public:
  using DataError::DataError;
};

/// A class is missing from one of the cross-validation folds.
class StratificationError : public DataError {
 public:
  using DataError::DataError;
};

/// Two neighbouring mel edges landed on the same FFT bin.
class DegenerateFilterError : public NumericError {
 public:
  DegenerateFilterError(const std::string& what, int filter_index)
      : NumericError(what), filter_index_(filter_index) {}
  int filter_index() const noexcept { return filter_index_; }

 private:
  int filter_index_;
};

/// Power iteration ran out of iterations; carries its last estimate.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : NumericError(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

class IllConditionedError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// NRMSE of a constant target has no scale to normalize by.
class UndefinedNormalizationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace echoaudio
