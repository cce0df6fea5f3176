#pragma once

// Binary NK landscape files (.nkl), little-endian:
//
//   offset  size  field
//   0       4     magic "NKLS"
//   4       2     u16 format version (1)
//   6       2     u16 n
//   8       2     u16 k
//   10      8     u64 seed
//   18      4     u32 generator id
//   22      8*E   E = n 2^(k+1) float64 table entries, site-major
//   22+8E   4     u32 CRC-32 (zlib polynomial) of the payload bytes

#include <zlib.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"
#include "nk_landscape.hpp"
#include "rng.hpp"

namespace nkarena {

inline constexpr std::uint16_t kLandscapeFormatVersion = 1;
inline constexpr std::array<char, 4> kLandscapeMagic{'N', 'K', 'L', 'S'};
inline constexpr std::size_t kLandscapeHeaderBytes = 22;

namespace detail {

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(value >> (8 * i)));
}

template <class T>
T get_le(const unsigned char* in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(in[i]) << (8 * i));
  return value;
}

inline std::uint32_t crc32_of(const unsigned char* data, std::size_t size) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace detail

inline void save_landscape(const NkLandscape& landscape, std::ostream& sink) {
  std::vector<unsigned char> bytes;
  const auto tables = landscape.tables();
  bytes.reserve(kLandscapeHeaderBytes + 8 * tables.size() + 4);
  bytes.insert(bytes.end(), kLandscapeMagic.begin(), kLandscapeMagic.end());
  detail::put_le<std::uint16_t>(bytes, kLandscapeFormatVersion);
  detail::put_le<std::uint16_t>(bytes, static_cast<std::uint16_t>(landscape.n()));
  detail::put_le<std::uint16_t>(bytes, static_cast<std::uint16_t>(landscape.k()));
  detail::put_le<std::uint64_t>(bytes, landscape.seed());
  detail::put_le<std::uint32_t>(bytes, kGeneratorId);
  for (double entry : tables) detail::put_le<std::uint64_t>(bytes, std::bit_cast<std::uint64_t>(entry));
  const std::uint32_t crc =
      detail::crc32_of(bytes.data() + kLandscapeHeaderBytes, bytes.size() - kLandscapeHeaderBytes);
  detail::put_le<std::uint32_t>(bytes, crc);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error("failed writing landscape");
}

inline void save_landscape(const NkLandscape& landscape, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_landscape(landscape, out);
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

inline NkLandscape load_landscape(std::istream& source) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  if (bytes.size() < kLandscapeHeaderBytes) {
    throw LoadError(LoadError::Kind::truncated, "landscape file truncated inside the header (" +
                                                    std::to_string(bytes.size()) + " bytes)");
  }
  if (!std::equal(kLandscapeMagic.begin(), kLandscapeMagic.end(), bytes.begin())) {
    throw LoadError(LoadError::Kind::bad_magic, "not a landscape file (bad magic)");
  }
  const auto version = detail::get_le<std::uint16_t>(&bytes[4]);
  if (version != kLandscapeFormatVersion) {
    throw LoadError(LoadError::Kind::version, "unsupported landscape format version " + std::to_string(version) +
                                                  " (this build reads version " +
                                                  std::to_string(kLandscapeFormatVersion) + ")");
  }
  const unsigned n = detail::get_le<std::uint16_t>(&bytes[6]);
  const unsigned k = detail::get_le<std::uint16_t>(&bytes[8]);
  const auto seed = detail::get_le<std::uint64_t>(&bytes[10]);
  try {
    NkLandscape::validate(n, k);
  } catch (const Error& e) {
    throw LoadError(LoadError::Kind::bad_header, std::string("corrupt landscape header: ") + e.what());
  }
  const std::size_t entries = NkLandscape::table_size(n, k);
  const std::size_t expected = kLandscapeHeaderBytes + 8 * entries + 4;
  if (bytes.size() < expected) {
    throw LoadError(LoadError::Kind::truncated, "landscape file truncated: expected " + std::to_string(expected) +
                                                    " bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw LoadError(LoadError::Kind::bad_header, "landscape file has " + std::to_string(bytes.size() - expected) +
                                                     " trailing bytes");
  }
  const unsigned char* payload = bytes.data() + kLandscapeHeaderBytes;
  const auto stored_crc = detail::get_le<std::uint32_t>(payload + 8 * entries);
  if (detail::crc32_of(payload, 8 * entries) != stored_crc) {
    throw LoadError(LoadError::Kind::checksum, "landscape payload checksum mismatch");
  }
  std::vector<double> tables(entries);
  for (std::size_t i = 0; i < entries; ++i) {
    tables[i] = std::bit_cast<double>(detail::get_le<std::uint64_t>(payload + 8 * i));
  }
  return NkLandscape(n, k, seed, std::move(tables));
}

inline NkLandscape load_landscape(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadError::Kind::io, "cannot open landscape file " + path.string());
  try {
    return load_landscape(in);
  } catch (const LoadError& e) {
    throw LoadError(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace nkarena
