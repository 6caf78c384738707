#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qrng {

/// Simulated detector configuration. rate_hz is the effective detected
/// event rate, not the physical activity of the source.
struct SourceConfig {
  double rate_hz = 46.0;
  double resolution_s = 100e-9;
  std::uint32_t chip_count = 15;
  std::uint64_t sim_seed = 0;
};

/// Throws InvalidArgument listing the first violated invariant.
void validate(const SourceConfig& config);

/// Quantized detection timestamps from one chip.
struct TickStream {
  std::vector<std::uint64_t> ticks;
  double resolution_s = 100e-9;
  /// Events that landed in the same tick as their predecessor.
  std::size_t duplicate_ticks = 0;
};

/// splitmix64 finalizer. Used for per-chip and per-round sub-seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for chip `chip_index`: mix_seed(sim_seed ^ mix_seed(chip_index + 1)).
std::uint64_t chip_seed(std::uint64_t sim_seed, std::uint64_t chip_index);

/// Seed for acquisition round `round` of a multi-round source.
std::uint64_t round_seed(std::uint64_t sim_seed, std::uint64_t round);

/// `count` Exponential(rate_hz) draws by inverse transform -ln(1-u)/rate
/// with u in [0,1) from a seeded mt19937_64.
std::vector<double> sample_intervals(double rate_hz, std::size_t count,
                                     std::uint64_t sim_seed);

/// Event times in [0, duration_s) for one chip, quantized to
/// floor(t / resolution_s).
TickStream simulate_chip(const SourceConfig& config, double duration_s,
                         std::uint32_t chip_index);

/// Runs simulate_chip for every chip; chips are simulated in parallel.
std::vector<TickStream> simulate_chips(const SourceConfig& config,
                                       double duration_s);

}  // namespace qrng
