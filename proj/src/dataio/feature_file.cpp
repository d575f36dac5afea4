#include "mvd/dataio/feature_file.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvd/dataio/bytes.hpp"
#include "mvd/dataio/errors.hpp"

namespace mvd {
namespace {

constexpr std::uint8_t kMagic[4] = {'M', 'V', 'D', 'F'};
constexpr std::size_t kHeaderSize = 4 + 1 + 4 + 4;

}  // namespace

std::vector<std::uint8_t> encode_view_features(const Matrix& m) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (m.rows() > kMax || m.cols() > kMax) {
    throw IoError(IoError::Kind::DimOverflow, "matrix shape exceeds u32 range");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 4 * m.size());
  for (auto b : kMagic) out.push_back(static_cast<std::uint8_t>(b));
  out.push_back(kFeatureFileVersion);
  bytes::put_uint(out, static_cast<std::uint32_t>(m.rows()));
  bytes::put_uint(out, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.flat()) {
    const float f = static_cast<float>(v);
    if (!std::isfinite(f)) throw IoError(IoError::Kind::Corrupt, "non-finite feature value");
    bytes::put_f32(out, f);
  }
  return out;
}

FeatureFile decode_view_features(const std::vector<std::uint8_t>& data) {
  const std::size_t lead = std::min<std::size_t>(data.size(), 4);
  if (!std::equal(data.begin(), data.begin() + static_cast<long>(lead), std::begin(kMagic))) {
    throw IoError(IoError::Kind::BadMagic, "not a view feature file (bad magic)");
  }
  // A bare prefix of the magic is a cut-off file rather than a foreign one.
  if (data.size() < kHeaderSize) throw IoError(IoError::Kind::Truncated, "feature file header truncated");
  FeatureFileHeader h;
  h.version = data[4];
  if (h.version != kFeatureFileVersion) {
    throw IoError(IoError::Kind::VersionMismatch, "unsupported feature file version " + std::to_string(h.version));
  }
  h.rows = bytes::get_uint<std::uint32_t>(data.data() + 5);
  h.cols = bytes::get_uint<std::uint32_t>(data.data() + 9);
  const std::uint64_t count = static_cast<std::uint64_t>(h.rows) * h.cols;
  if (count > (std::numeric_limits<std::uint64_t>::max() - kHeaderSize) / 4 ||
      count > std::numeric_limits<std::size_t>::max() / sizeof(double)) {
    throw IoError(IoError::Kind::DimOverflow, "feature file dimensions overflow");
  }
  const std::uint64_t expected = kHeaderSize + 4 * count;
  if (data.size() < expected) {
    throw IoError(IoError::Kind::Truncated, "feature payload truncated: expected " + std::to_string(count) +
                                                " floats, found " + std::to_string((data.size() - kHeaderSize) / 4));
  }
  if (data.size() > expected) throw IoError(IoError::Kind::Corrupt, "trailing bytes after feature payload");
  std::vector<double> values(static_cast<std::size_t>(count));
  const std::uint8_t* p = data.data() + kHeaderSize;
  for (std::size_t i = 0; i < values.size(); ++i, p += 4) {
    const float f = bytes::get_f32(p);
    if (!std::isfinite(f)) throw IoError(IoError::Kind::Corrupt, "non-finite value in feature payload");
    values[i] = f;
  }
  return {Matrix(h.rows, h.cols, std::move(values)), h};
}

FeatureFile read_view_features(const std::filesystem::path& path) {
  return decode_view_features(bytes::read_file(path));
}

void write_view_features(const Matrix& m, const std::filesystem::path& path) {
  bytes::write_file(path, encode_view_features(m));
}

}  // namespace mvd
