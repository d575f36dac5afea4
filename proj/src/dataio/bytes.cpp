#include "mvd/dataio/bytes.hpp"

#include <fstream>
#include <iterator>

#include "mvd/dataio/errors.hpp"

namespace mvd {

const char* to_string(IoError::Kind kind) noexcept {
  switch (kind) {
    case IoError::Kind::NotFound: return "not_found";
    case IoError::Kind::Io: return "io";
    case IoError::Kind::BadMagic: return "bad_magic";
    case IoError::Kind::VersionMismatch: return "version_mismatch";
    case IoError::Kind::Truncated: return "truncated";
    case IoError::Kind::DimOverflow: return "dim_overflow";
    case IoError::Kind::Corrupt: return "corrupt";
    case IoError::Kind::Schema: return "schema";
  }
  return "unknown";
}

namespace bytes {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    const auto kind = std::filesystem::exists(path) ? IoError::Kind::Io : IoError::Kind::NotFound;
    throw IoError(kind, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::Io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError(IoError::Kind::Io, "write failed: " + path.string());
}

}  // namespace bytes
}  // namespace mvd
