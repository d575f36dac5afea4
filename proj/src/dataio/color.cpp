#include "mvd/dataio/color.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "mvd/dataio/errors.hpp"

namespace mvd {
namespace {

double srgb_to_linear(std::uint8_t c8) {
  const double c = c8 / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

std::size_t clamp_bin(double v, double lo, std::size_t n) {
  const double idx = std::floor((v - lo) / 10.0);
  if (idx < 0.0) return 0;
  return std::min(static_cast<std::size_t>(idx), n - 1);
}

}  // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = srgb_to_linear(r8), g = srgb_to_linear(g8), b = srgb_to_linear(b8);
  // D65 white, IEC 61966-2-1 primaries.
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;
  const double fx = lab_f(x / xn), fy = lab_f(y / yn), fz = lab_f(z / zn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabBin lab_bin(const Lab& lab) {
  return {clamp_bin(lab.l, 0.0, kLBins), clamp_bin(lab.a, -128.0, kABins), clamp_bin(lab.b, -128.0, kBBins)};
}

Vector lab_histogram(std::span<const std::uint8_t> pixels, std::size_t width, std::size_t height,
                     HistogramLayout layout) {
  const std::size_t n = width * height;
  if (n == 0) throw std::invalid_argument("lab_histogram: image has no pixels");
  if (pixels.size() != 3 * n) throw std::invalid_argument("lab_histogram: buffer length != 3 * width * height");
  Vector hist(layout == HistogramLayout::Joint ? kJointLabBins : kMarginalLabBins, 0.0);
  std::vector<std::size_t> counts(hist.size(), 0);
  for (std::size_t p = 0; p < n; ++p) {
    const LabBin bin = lab_bin(srgb_to_lab(pixels[3 * p], pixels[3 * p + 1], pixels[3 * p + 2]));
    if (layout == HistogramLayout::Joint) {
      ++counts[joint_index(bin)];
    } else {
      ++counts[bin.l];
      ++counts[kLBins + bin.a];
      ++counts[kLBins + kABins + bin.b];
    }
  }
  const double denom = static_cast<double>(layout == HistogramLayout::Joint ? n : 3 * n);
  for (std::size_t i = 0; i < hist.size(); ++i) hist[i] = static_cast<double>(counts[i]) / denom;
  return hist;
}

namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

std::size_t parse_count(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(tok, &pos);
    if (pos != tok.size() || v < 0) throw std::invalid_argument(what);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw IoError(IoError::Kind::Schema, std::string("PPM: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

RgbImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::filesystem::exists(path) ? IoError::Kind::Io : IoError::Kind::NotFound,
                         "cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P6" && magic != "P3") throw IoError(IoError::Kind::BadMagic, "not a P3/P6 PPM: " + path.string());
  RgbImage img;
  img.width = parse_count(next_token(in), "width");
  img.height = parse_count(next_token(in), "height");
  const std::size_t maxval = parse_count(next_token(in), "maxval");
  if (maxval == 0 || maxval > 255) throw IoError(IoError::Kind::Schema, "PPM: only maxval 1..255 supported");
  const std::size_t n = 3 * img.width * img.height;
  img.pixels.resize(n);
  auto scale = [maxval](std::size_t v) {
    return static_cast<std::uint8_t>(std::lround(static_cast<double>(std::min(v, maxval)) * 255.0 / maxval));
  };
  if (magic == "P6") {
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw IoError(IoError::Kind::Truncated, "PPM pixel data truncated");
    if (maxval != 255)
      for (auto& p : img.pixels) p = scale(p);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw IoError(IoError::Kind::Truncated, "PPM pixel data truncated");
      img.pixels[i] = scale(parse_count(tok, "sample"));
    }
  }
  return img;
}

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::Io, "cannot write " + path.string());
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

}  // namespace mvd
