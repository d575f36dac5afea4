#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mvd/numerics/matrix.hpp"

namespace mvd {

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// sRGB (8-bit, D65) to CIELAB.
Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Bins of width 10: L in [0,100] -> 10 bins, a and b in [-128,128) -> 26 bins each.
// Values outside the range land in the edge bins.
inline constexpr std::size_t kLBins = 10;
inline constexpr std::size_t kABins = 26;
inline constexpr std::size_t kBBins = 26;
inline constexpr std::size_t kJointLabBins = kLBins * kABins * kBBins;     // 6760
inline constexpr std::size_t kMarginalLabBins = kLBins + kABins + kBBins;  // 62

struct LabBin {
  std::size_t l, a, b;
};
LabBin lab_bin(const Lab& lab);
inline std::size_t joint_index(const LabBin& bin) { return (bin.l * kABins + bin.a) * kBBins + bin.b; }

enum class HistogramLayout { Joint, Marginal };

/// Fraction of pixels per LAB bin. `pixels` is interleaved RGB8, row-major.
Vector lab_histogram(std::span<const std::uint8_t> pixels, std::size_t width, std::size_t height,
                     HistogramLayout layout = HistogramLayout::Joint);

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Reads binary (P6) or ASCII (P3) PPM with maxval <= 255.
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const RgbImage& img, const std::filesystem::path& path);

}  // namespace mvd
