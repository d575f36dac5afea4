#pragma once

// Little-endian scalar encoding helpers shared by the binary formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <vector>

namespace mvd::bytes {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename UInt>
void put_uint(std::vector<std::uint8_t>& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename UInt>
UInt get_uint(const std::uint8_t* p) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(p[i]) << (8 * i);
  return v;
}

inline void put_f32(std::vector<std::uint8_t>& out, float f) { put_uint(out, std::bit_cast<std::uint32_t>(f)); }
inline void put_f64(std::vector<std::uint8_t>& out, double d) { put_uint(out, std::bit_cast<std::uint64_t>(d)); }
inline float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_uint<std::uint32_t>(p)); }
inline double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_uint<std::uint64_t>(p)); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace mvd::bytes
