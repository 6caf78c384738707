#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrng {

/// Unpacked bit sequence, one element per bit holding 0 or 1.
using Bits = std::vector<std::uint8_t>;
using Bytes = std::vector<std::uint8_t>;

/// Packs bits into bytes, first bit in the most significant position.
/// A trailing partial byte is zero padded.
Bytes pack_bits(std::span<const std::uint8_t> bits);

/// Inverse of pack_bits; takes the first bit_count bits.
Bits unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count);

inline Bits unpack_bits(std::span<const std::uint8_t> bytes) {
  return unpack_bits(bytes, bytes.size() * 8);
}

/// Hex digit per 4-bit group, first bit most significant in the nibble.
std::string bits_to_hex(std::span<const std::uint8_t> bits);

/// Inverse of bits_to_hex.
Bits hex_to_bits(std::string_view hex);

/// Two digits per byte in stream order. An odd trailing digit becomes the
/// high nibble of a final byte whose low nibble is zero.
Bytes hex_to_bytes(std::string_view hex);

std::string bytes_to_hex(std::span<const std::uint8_t> bytes);

}  // namespace qrng
