#include "qrng/bits.hpp"

#include "qrng/error.hpp"

namespace qrng {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidSeed: return "invalid-seed";
    case ErrorKind::SourceUnderrun: return "source-underrun";
    case ErrorKind::InsufficientEntropy: return "insufficient-entropy";
    case ErrorKind::RequestTooLarge: return "request-too-large";
    case ErrorKind::ReseedRequired: return "reseed-required";
    case ErrorKind::ZeroVariance: return "zero-variance";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Format: return "format";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr char kHexDigits[] = "0123456789abcdef";

}  // namespace

Bytes pack_bits(std::span<const std::uint8_t> bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1u) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) {
    fail(ErrorKind::InvalidArgument, "unpack_bits: bit count exceeds buffer");
  }
  Bits out(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) {
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return out;
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  if (bits.size() % 4 != 0) {
    fail(ErrorKind::InvalidArgument,
         "bits_to_hex: length " + std::to_string(bits.size()) +
             " is not a multiple of 4");
  }
  std::string hex;
  hex.reserve(bits.size() / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    const unsigned nibble = (bits[i] & 1u) << 3 | (bits[i + 1] & 1u) << 2 |
                            (bits[i + 2] & 1u) << 1 | (bits[i + 3] & 1u);
    hex.push_back(kHexDigits[nibble]);
  }
  return hex;
}

Bits hex_to_bits(std::string_view hex) {
  Bits out;
  out.reserve(hex.size() * 4);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int v = hex_value(hex[i]);
    if (v < 0) {
      throw FormatError("invalid hex digit", i);
    }
    for (int b = 3; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  }
  return out;
}

Bytes hex_to_bytes(std::string_view hex) {
  Bytes out((hex.size() + 1) / 2, 0);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int v = hex_value(hex[i]);
    if (v < 0) {
      throw FormatError("invalid hex digit", i);
    }
    out[i / 2] |= static_cast<std::uint8_t>(i % 2 == 0 ? v << 4 : v);
  }
  return out;
}

std::string bytes_to_hex(std::span<const std::uint8_t> bytes) {
  std::string hex;
  hex.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    hex.push_back(kHexDigits[b >> 4]);
    hex.push_back(kHexDigits[b & 0xf]);
  }
  return hex;
}

}  // namespace qrng
