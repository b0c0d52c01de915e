#include "pdsage/cfr_file.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "pdsage/errors.hpp"

namespace pdsage::io {

static_assert(std::endian::native == std::endian::little,
              "CFR files are read and written with native little-endian byte order");

namespace {

template <typename T>
void put(std::vector<char>& buf, std::size_t offset, T value) {
  std::memcpy(buf.data() + offset, &value, sizeof(T));
}

template <typename T>
T get(const std::array<char, kCfrHeaderSize>& buf, std::size_t offset) {
  T value;
  std::memcpy(&value, buf.data() + offset, sizeof(T));
  return value;
}

CfrHeader header_of(const CfrTensor& t) {
  CfrHeader h;
  h.n_freq = t.n_freq();
  h.n_rx = static_cast<std::uint32_t>(t.n_rx());
  h.n_tx = static_cast<std::uint32_t>(t.n_tx());
  h.f_start = t.sweep().f_start;
  h.delta_f = t.sweep().delta_f;
  return h;
}

}  // namespace

void store_cfr(std::ostream& out, const CfrTensor& tensor) {
  if (tensor.n_rx() > std::numeric_limits<std::uint32_t>::max() ||
      tensor.n_tx() > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("array too large for the CFR format");
  const CfrHeader h = header_of(tensor);
  std::vector<char> head(kCfrHeaderSize, 0);
  std::memcpy(head.data(), "CFRT", 4);
  put(head, 4, h.version);
  put(head, 8, kEndianTag);
  put(head, 12, std::uint32_t{0});
  put(head, 16, h.n_freq);
  put(head, 24, h.n_rx);
  put(head, 28, h.n_tx);
  put(head, 32, h.f_start);
  put(head, 40, h.delta_f);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  // Row-major K x (N_R N_T) storage is already k-major, then r, then t.
  out.write(reinterpret_cast<const char*>(tensor.data().data()),
            static_cast<std::streamsize>(h.payload_bytes()));
  if (!out) throw std::runtime_error("failed to write CFR data");
}

void store_cfr(const std::filesystem::path& path, const CfrTensor& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  store_cfr(out, tensor);
}

CfrHeader read_cfr_header(std::istream& in) {
  std::array<char, kCfrHeaderSize> buf{};
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  const auto got = static_cast<std::uint64_t>(in.gcount());
  if (got < kCfrHeaderSize)
    throw FormatError("truncated header: expected " + std::to_string(kCfrHeaderSize) +
                          " bytes, found " + std::to_string(got),
                      got);
  if (std::memcmp(buf.data(), "CFRT", 4) != 0) throw FormatError("bad magic, not a CFR file", 0);
  CfrHeader h;
  h.version = get<std::uint32_t>(buf, 4);
  if (h.version != kCfrVersion)
    throw FormatError("unsupported version " + std::to_string(h.version) + ", expected " +
                          std::to_string(kCfrVersion),
                      4);
  if (get<std::uint32_t>(buf, 8) != kEndianTag)
    throw FormatError("endianness tag mismatch", 8);
  h.n_freq = get<std::uint64_t>(buf, 16);
  h.n_rx = get<std::uint32_t>(buf, 24);
  h.n_tx = get<std::uint32_t>(buf, 28);
  h.f_start = get<double>(buf, 32);
  h.delta_f = get<double>(buf, 40);
  if (h.n_freq < 2) throw FormatError("fewer than two sweep points", 16);
  if (h.n_rx == 0) throw FormatError("zero Rx elements", 24);
  if (h.n_tx == 0) throw FormatError("zero Tx elements", 28);
  if (!(h.f_start > 0.0) || !std::isfinite(h.f_start)) throw FormatError("invalid f_start", 32);
  if (!(h.delta_f > 0.0) || !std::isfinite(h.delta_f)) throw FormatError("invalid delta_f", 40);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 16;
  if (h.n_freq > limit / (std::uint64_t{h.n_rx} * h.n_tx))
    throw FormatError("header dimensions overflow the payload size", 16);
  return h;
}

CfrHeader read_cfr_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_cfr_header(in);
}

CfrTensor load_cfr(std::istream& in) {
  const CfrHeader h = read_cfr_header(in);
  SweepConfig sweep;
  sweep.f_start = h.f_start;
  sweep.delta_f = h.delta_f;
  sweep.n_points = static_cast<std::size_t>(h.n_freq);
  const ArrayConfig array = ArrayConfig::half_wavelength(h.n_tx, h.n_rx, sweep.center_wavelength());
  const std::uint64_t want = h.payload_bytes();

  // Check the size before allocating so a corrupt header cannot request gigabytes.
  const auto here = in.tellg();
  if (here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    const auto avail = static_cast<std::uint64_t>(end - here);
    if (avail < want)
      throw FormatError("truncated payload: expected " + std::to_string(want) +
                            " bytes, found " + std::to_string(avail),
                        kCfrHeaderSize + avail);
  }

  CfrTensor out(sweep, array);
  in.read(reinterpret_cast<char*>(out.data().data()), static_cast<std::streamsize>(want));
  const auto got = static_cast<std::uint64_t>(in.gcount());
  if (got != want)
    throw FormatError("truncated payload: expected " + std::to_string(want) + " bytes, found " +
                          std::to_string(got),
                      kCfrHeaderSize + got);
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("trailing bytes after payload", kCfrHeaderSize + want);
  return out;
}

CfrTensor load_cfr(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_cfr(in);
}

}  // namespace pdsage::io
