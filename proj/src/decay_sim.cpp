#include "qrng/decay_sim.hpp"

#include <cmath>
#include <future>
#include <random>
#include <string>

#include "qrng/error.hpp"

namespace qrng {

namespace {

class ExponentialSampler {
 public:
  ExponentialSampler(double rate_hz, std::uint64_t seed)
      : rate_(rate_hz), engine_(seed) {}

  double operator()() {
    // 53 random mantissa bits, u in [0, 1)
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return -std::log1p(-u) / rate_;
  }

 private:
  double rate_;
  std::mt19937_64 engine_;
};

}  // namespace

void validate(const SourceConfig& config) {
  if (!(config.rate_hz > 0.0) || !std::isfinite(config.rate_hz)) {
    fail(ErrorKind::InvalidArgument, "source.rate_hz must be positive");
  }
  if (!(config.resolution_s > 0.0) || !std::isfinite(config.resolution_s)) {
    fail(ErrorKind::InvalidArgument, "source.resolution_s must be positive");
  }
  if (config.chip_count < 1) {
    fail(ErrorKind::InvalidArgument, "source.chip_count must be at least 1");
  }
  if (!(config.rate_hz * config.resolution_s < 0.5)) {
    fail(ErrorKind::InvalidArgument,
         "source.rate_hz * source.resolution_s must be below 0.5");
  }
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t chip_seed(std::uint64_t sim_seed, std::uint64_t chip_index) {
  return mix_seed(sim_seed ^ mix_seed(chip_index + 1));
}

std::uint64_t round_seed(std::uint64_t sim_seed, std::uint64_t round) {
  return round == 0 ? sim_seed : mix_seed(sim_seed + 0x632be59bd9b4e019ull * round);
}

std::vector<double> sample_intervals(double rate_hz, std::size_t count,
                                     std::uint64_t sim_seed) {
  if (!(rate_hz > 0.0)) {
    fail(ErrorKind::InvalidArgument, "sample_intervals: rate must be positive");
  }
  if (count == 0) {
    fail(ErrorKind::InvalidArgument, "sample_intervals: count must be positive");
  }
  ExponentialSampler sample(rate_hz, sim_seed);
  std::vector<double> out(count);
  for (double& d : out) d = sample();
  return out;
}

TickStream simulate_chip(const SourceConfig& config, double duration_s,
                         std::uint32_t chip_index) {
  validate(config);
  if (!(duration_s > 0.0)) {
    fail(ErrorKind::InvalidArgument, "simulate_chip: duration must be positive");
  }
  if (chip_index >= config.chip_count) {
    fail(ErrorKind::InvalidArgument,
         "simulate_chip: chip index " + std::to_string(chip_index) +
             " out of range");
  }

  ExponentialSampler sample(config.rate_hz,
                            chip_seed(config.sim_seed, chip_index));
  TickStream stream;
  stream.resolution_s = config.resolution_s;
  stream.ticks.reserve(static_cast<std::size_t>(
      config.rate_hz * duration_s + 6.0 * std::sqrt(config.rate_hz * duration_s) + 16));

  double t = sample();
  while (t < duration_s) {
    const auto tick = static_cast<std::uint64_t>(std::floor(t / config.resolution_s));
    if (!stream.ticks.empty() && stream.ticks.back() == tick) ++stream.duplicate_ticks;
    stream.ticks.push_back(tick);
    t += sample();
  }
  return stream;
}

std::vector<TickStream> simulate_chips(const SourceConfig& config,
                                       double duration_s) {
  validate(config);
  std::vector<std::future<TickStream>> jobs;
  jobs.reserve(config.chip_count);
  for (std::uint32_t chip = 0; chip < config.chip_count; ++chip) {
    jobs.push_back(std::async(std::launch::async, [&config, duration_s, chip] {
      return simulate_chip(config, duration_s, chip);
    }));
  }
  std::vector<TickStream> streams;
  streams.reserve(jobs.size());
  for (auto& job : jobs) streams.push_back(job.get());
  return streams;
}

}  // namespace qrng
