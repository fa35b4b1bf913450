#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "echoaudio/esn/esn.hpp"
#include "echoaudio/esn/readout.hpp"

namespace echoaudio::esn {

/// EARC container, version 1, little-endian:
///   "EARC" u32 version
///   config: u32 N, u32 M, f64 prob, f64 rho, f64 leak, f64 input_scale,
///           f64 bias_scale, u64 seed
///   w_in:   N*M f64 row-major
///   w_res:  u64 nnz, nnz * (u32 row, u32 col, f64 value), row-major order
///   bias:   N f64
///   u8 has_readout [u32 P, u32 cols, u8 intercept, f64 lambda, P*cols f64]
inline constexpr std::uint32_t kEarcVersion = 1;

std::string encode_earc(const Esn& esn, const Readout* readout = nullptr);

struct DecodedReservoir {
  Esn esn;
  std::optional<Readout> readout;
  std::size_t bytes_consumed = 0;
};

/// Decodes an EARC block at the start of `bytes`; trailing data is left for
/// the caller (extractors append a filterbank block).
DecodedReservoir decode_earc(std::string_view bytes);

/// Human-readable JSON of the configuration (the sidecar file).
std::string config_to_json(const EsnConfig& cfg);
EsnConfig config_from_json(std::string_view json);

}  // namespace echoaudio::esn
