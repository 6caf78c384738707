#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "qrng/bits.hpp"
#include "qrng/decay_sim.hpp"
#include "qrng/toeplitz.hpp"

namespace qrng {

/// Binary tick stream, little-endian:
///   "QTIK" | resolution_s (f64) | count (u64) | count x tick (u64)
void write_tick_stream(std::ostream& out, const TickStream& stream);
TickStream read_tick_stream(std::istream& in);

/// Debug text form: one decimal tick per line, no header.
void write_tick_stream_text(std::ostream& out, const TickStream& stream);
TickStream read_tick_stream_text(std::istream& in, double resolution_s);

/// Packed bit file, little-endian header:
///   "QBIT" | bit_count (u64) | ceil(bit_count/8) bytes, first bit = MSB of first byte
void write_packed_bits(std::ostream& out, std::span<const std::uint8_t> bits);
Bits read_packed_bits(std::istream& in);

/// key=value text: n_rows, n_cols, taps (decimal exponents separated by
/// spaces or commas), first_column (hex, n_rows/4 digits rounded up).
void write_toeplitz_params(std::ostream& out, const ToeplitzParams& params);
ToeplitzParams read_toeplitz_params(std::istream& in);

/// Bitstream export for external test suites.
void export_bits_ascii(std::ostream& out, std::span<const std::uint8_t> bits);
void export_bits_binary(std::ostream& out, std::span<const std::uint8_t> bits);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_text_file(const std::filesystem::path& path, const std::string& text);

TickStream load_tick_stream(const std::filesystem::path& path);
void save_tick_stream(const std::filesystem::path& path, const TickStream& stream);
Bits load_packed_bits(const std::filesystem::path& path);
void save_packed_bits(const std::filesystem::path& path, std::span<const std::uint8_t> bits);
ToeplitzParams load_toeplitz_params(const std::filesystem::path& path);

}  // namespace qrng
