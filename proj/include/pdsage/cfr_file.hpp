#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "pdsage/types.hpp"

namespace pdsage::io {

// Layout (little-endian):
//   0  "CFRT"
//   4  u32 version
//   8  u32 endianness tag 0x01020304
//  12  u32 reserved (0)
//  16  u64 K
//  24  u32 N_R
//  28  u32 N_T
//  32  f64 f_start
//  40  f64 delta_f
//  48  K * N_R * N_T complex values as (re, im) f64 pairs, k-major, then r, then t
inline constexpr std::uint32_t kCfrVersion = 1;
inline constexpr std::uint32_t kEndianTag = 0x01020304;
inline constexpr std::size_t kCfrHeaderSize = 48;

struct CfrHeader {
  std::uint32_t version = kCfrVersion;
  std::uint64_t n_freq = 0;
  std::uint32_t n_rx = 0;
  std::uint32_t n_tx = 0;
  double f_start = 0.0;
  double delta_f = 0.0;

  std::uint64_t payload_bytes() const { return n_freq * n_rx * n_tx * 16; }
};

void store_cfr(std::ostream& out, const CfrTensor& tensor);
void store_cfr(const std::filesystem::path& path, const CfrTensor& tensor);

CfrHeader read_cfr_header(std::istream& in);
CfrHeader read_cfr_header(const std::filesystem::path& path);

/// The file carries no array geometry, so loaded tensors get half-wavelength
/// spacing at the sweep's center wavelength.
CfrTensor load_cfr(std::istream& in);
CfrTensor load_cfr(const std::filesystem::path& path);

}  // namespace pdsage::io
