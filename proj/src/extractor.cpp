#include "qrng/extractor.hpp"

#include <string>

#include "qrng/error.hpp"

namespace qrng {

const char* to_string(ExtractionMethod method) {
  switch (method) {
    case ExtractionMethod::CountWindow: return "count-window";
    case ExtractionMethod::IntervalParity: return "interval-parity";
    case ExtractionMethod::IntervalCompare: return "interval-compare";
  }
  return "unknown";
}

ExtractionMethod parse_extraction_method(std::string_view name) {
  if (name == "count-window" || name == "1") return ExtractionMethod::CountWindow;
  if (name == "interval-parity" || name == "2") return ExtractionMethod::IntervalParity;
  if (name == "interval-compare" || name == "3") return ExtractionMethod::IntervalCompare;
  fail(ErrorKind::InvalidArgument,
       "unknown extraction method '" + std::string(name) + "'");
}

Bits extract_count_window(const TickStream& stream, std::uint64_t window_ticks) {
  if (window_ticks == 0) {
    fail(ErrorKind::InvalidArgument, "extract_count_window: window must be >= 1 tick");
  }
  Bits out;
  if (stream.ticks.empty()) return out;

  out.reserve(static_cast<std::size_t>(stream.ticks.back() / window_ticks + 1));
  std::uint64_t window = 0;
  std::uint8_t parity = 0;
  for (std::uint64_t tick : stream.ticks) {
    const std::uint64_t w = tick / window_ticks;
    while (window < w) {
      out.push_back(parity);
      parity = 0;
      ++window;
    }
    parity ^= 1u;
  }
  out.push_back(parity);
  return out;
}

Bits extract_parity(const TickStream& stream) {
  Bits out;
  const auto& t = stream.ticks;
  if (t.size() < 2) return out;
  out.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    out.push_back(static_cast<std::uint8_t>((t[i] - t[i - 1]) & 1u));
  }
  return out;
}

Bits extract_compare(const TickStream& stream, bool invert) {
  Bits out;
  const auto& t = stream.ticks;
  if (t.size() < 3) return out;
  out.reserve(t.size() - 2);
  const std::uint8_t longer_first = invert ? 1 : 0;
  std::uint64_t prev = t[1] - t[0];
  for (std::size_t i = 2; i < t.size(); ++i) {
    const std::uint64_t next = t[i] - t[i - 1];
    if (prev > next) {
      out.push_back(longer_first);
    } else if (prev < next) {
      out.push_back(longer_first ^ 1u);
    }
    prev = next;
  }
  return out;
}

Bits extract(const TickStream& stream, ExtractionMethod method,
             std::uint64_t window_ticks, bool invert_compare) {
  switch (method) {
    case ExtractionMethod::CountWindow: return extract_count_window(stream, window_ticks);
    case ExtractionMethod::IntervalParity: return extract_parity(stream);
    case ExtractionMethod::IntervalCompare: return extract_compare(stream, invert_compare);
  }
  fail(ErrorKind::InvalidArgument, "extract: unknown method");
}

RawBitBlock assemble_block(std::span<const Bits> streams, std::size_t target_bits,
                           ExtractionMethod method, double min_entropy_per_bit) {
  if (target_bits == 0) {
    fail(ErrorKind::InvalidArgument, "assemble_block: target must be positive");
  }
  if (!(min_entropy_per_bit > 0.0 && min_entropy_per_bit <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "assemble_block: min-entropy must lie in (0, 1]");
  }
  std::size_t available = 0;
  for (const Bits& s : streams) available += s.size();
  if (available < target_bits) {
    fail(ErrorKind::SourceUnderrun,
         "entropy source underrun: have " + std::to_string(available) +
             " bits, need " + std::to_string(target_bits) + " (short by " +
             std::to_string(target_bits - available) + ")");
  }

  RawBitBlock block;
  block.source_method = method;
  block.min_entropy_per_bit = min_entropy_per_bit;
  block.bits.reserve(target_bits);
  for (const Bits& s : streams) {
    const std::size_t take = std::min(s.size(), target_bits - block.bits.size());
    block.bits.insert(block.bits.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(take));
    if (block.bits.size() == target_bits) break;
  }
  return block;
}

}  // namespace qrng
