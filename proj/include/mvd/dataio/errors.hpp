#pragma once

#include <stdexcept>
#include <string>

namespace mvd {

/// Failure while reading or writing one of the on-disk formats.
class IoError : public std::runtime_error {
 public:
  enum class Kind {
    NotFound,
    Io,
    BadMagic,
    VersionMismatch,
    Truncated,
    DimOverflow,
    Corrupt,
    Schema,
  };

  IoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(IoError::Kind kind) noexcept;

}  // namespace mvd
