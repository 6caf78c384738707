#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qrng/bits.hpp"
#include "qrng/decay_sim.hpp"

namespace qrng {

enum class ExtractionMethod { CountWindow, IntervalParity, IntervalCompare };

const char* to_string(ExtractionMethod method);
ExtractionMethod parse_extraction_method(std::string_view name);

/// Raw bits ahead of conditioning, tagged with their per-bit min-entropy.
struct RawBitBlock {
  Bits bits;
  ExtractionMethod source_method = ExtractionMethod::IntervalCompare;
  double min_entropy_per_bit = 1.0;
};

/// Method 1: one bit per window of `window_ticks` ticks starting at tick 0,
/// equal to the parity of the event count in that window. Windows run up
/// to and including the one holding the last event.
Bits extract_count_window(const TickStream& stream, std::uint64_t window_ticks);

/// Method 2: parity of each inter-event interval measured in ticks.
Bits extract_parity(const TickStream& stream);

/// Method 3: sliding comparison of consecutive intervals d_i, d_{i+1}.
/// d_i > d_{i+1} gives 0, d_i < d_{i+1} gives 1, ties emit nothing.
/// `invert` swaps the mapping.
Bits extract_compare(const TickStream& stream, bool invert = false);

/// Dispatches to one of the three methods. window_ticks is only used by
/// CountWindow.
Bits extract(const TickStream& stream, ExtractionMethod method,
             std::uint64_t window_ticks = 1, bool invert_compare = false);

/// Concatenates per-chip sequences in index order and truncates to
/// target_bits. Throws SourceUnderrun when the chips fall short.
RawBitBlock assemble_block(std::span<const Bits> streams, std::size_t target_bits,
                           ExtractionMethod method, double min_entropy_per_bit);

}  // namespace qrng
