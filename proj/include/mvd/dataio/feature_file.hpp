#pragma once

// View feature file:
//   "MVDF" | version u8 (0x01) | rows u32 LE | cols u32 LE | rows*cols f32 LE, row-major

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mvd/numerics/matrix.hpp"

namespace mvd {

inline constexpr std::uint8_t kFeatureFileVersion = 0x01;

struct FeatureFileHeader {
  std::uint8_t version = kFeatureFileVersion;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

struct FeatureFile {
  Matrix values;
  FeatureFileHeader header;
};

/// Rows are returned exactly as stored (no normalization).
FeatureFile read_view_features(const std::filesystem::path& path);
FeatureFile decode_view_features(const std::vector<std::uint8_t>& bytes);

void write_view_features(const Matrix& m, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_view_features(const Matrix& m);

}  // namespace mvd
