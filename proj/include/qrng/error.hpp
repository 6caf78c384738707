#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qrng {

enum class ErrorKind {
  InvalidArgument,
  InvalidSeed,
  SourceUnderrun,
  InsufficientEntropy,
  RequestTooLarge,
  ReseedRequired,
  ZeroVariance,
  InsufficientData,
  Format,
  Validation,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed file content, carries the byte offset where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(ErrorKind::Format,
              what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace qrng
