#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "qrng/bits.hpp"

namespace qrng {

/// Hash_DRBG over SHA-256 (SP 800-90A, section 10.1.1).
namespace drbg {

inline constexpr std::size_t kSeedlenBits = 440;
inline constexpr std::size_t kSeedlenBytes = 55;
inline constexpr std::size_t kOutlenBits = 256;
inline constexpr unsigned kSecurityStrength = 256;
inline constexpr std::size_t kMaxBitsPerRequest = std::size_t{1} << 19;
inline constexpr std::uint64_t kDefaultReseedInterval = std::uint64_t{1} << 24;
inline constexpr std::size_t kMaxHashDfBits = 255 * kOutlenBits;

}  // namespace drbg

/// 440-bit value stored big-endian. Arithmetic on it is modulo 2^440.
using Seed440 = std::array<std::uint8_t, drbg::kSeedlenBytes>;

/// a += b mod 2^440, where b is a big-endian byte string of at most 55 bytes.
void add_mod_440(Seed440& a, std::span<const std::uint8_t> b);
void add_mod_440(Seed440& a, std::uint64_t b);

/// Entropy handed to instantiate / reseed, with the number of bits it is
/// credited for.
struct EntropyInput {
  Bytes bytes;
  std::size_t assessed_bits = 0;

  static EntropyInput from_bytes(std::span<const std::uint8_t> bytes);
  /// Two digits per byte. An odd trailing digit is left aligned in a final
  /// byte whose low nibble is zero; the credit is 4 bits per digit.
  static EntropyInput from_hex(std::string_view hex);
};

struct DrbgState {
  Seed440 v{};
  Seed440 c{};
  std::uint64_t reseed_counter = 0;
  std::uint64_t reseed_interval = drbg::kDefaultReseedInterval;
};

/// Hash derivation function. Returns ceil(n_bits/8) bytes; bits past
/// n_bits in the last byte are zero.
Bytes hash_df(std::span<const std::uint8_t> input, std::size_t n_bits);

/// Number of hash invocations the output loop makes for an n_bits request.
constexpr std::size_t hashgen_block_count(std::size_t n_bits) {
  return (n_bits + drbg::kOutlenBits - 1) / drbg::kOutlenBits;
}

DrbgState instantiate(const EntropyInput& entropy, std::span<const std::uint8_t> nonce = {},
                      std::span<const std::uint8_t> personalization = {},
                      std::uint64_t reseed_interval = drbg::kDefaultReseedInterval);

void reseed(DrbgState& state, const EntropyInput& entropy,
            std::span<const std::uint8_t> additional_input = {});

/// Returns ceil(n_bits/8) bytes. An empty additional input is treated as absent.
Bytes generate(DrbgState& state, std::size_t n_bits,
               std::span<const std::uint8_t> additional_input = {});

/// total_bits / request_bits consecutive generate() calls without
/// additional input, concatenated in request order. The V chain is
/// advanced serially and the output loops run on `workers` threads; the
/// result does not depend on the worker count. request_bits must be a
/// multiple of 8.
Bytes generate_bulk(DrbgState& state, std::uint64_t total_bits, std::size_t request_bits,
                    unsigned workers);

}  // namespace qrng
