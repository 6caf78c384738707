#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrng/decay_sim.hpp"
#include "qrng/extractor.hpp"
#include "qrng/hash_drbg.hpp"
#include "qrng/rng_eval.hpp"
#include "qrng/toeplitz.hpp"

namespace qrng {

/// Flat `dotted.key = value` configuration.
using KeyValues = std::map<std::string, std::string>;

struct DrbgConfig {
  std::size_t request_bits = 500'000;
  std::uint64_t total_bits = 1'000'000'000;
  unsigned workers = 1;
  std::uint64_t reseed_interval = drbg::kDefaultReseedInterval;
  bool prediction_resistance = false;
};

struct PipelineConfig {
  SourceConfig source;
  /// Acquisition window per round, seconds.
  double duration_s = 2.0;
  /// Length of the min-entropy calibration run, seconds.
  double calibration_s = 60.0;
  /// Number of acquisition rounds the source delivers before it reports a
  /// failure; 0 means unlimited. Used to exercise the fallback path.
  std::uint64_t max_rounds = 0;

  ExtractionMethod method = ExtractionMethod::IntervalCompare;
  std::uint64_t window_ticks = 1'086'957;
  bool invert_compare = false;
  std::size_t mcv_block_bits = 2;

  std::size_t n_rows = 476;
  std::size_t n_cols = 600;
  std::vector<unsigned> taps = kDefaultToeplitzTaps;
  std::optional<std::filesystem::path> toeplitz_params_path;
  /// Inline first column (fixture).
  std::optional<Bits> first_column;

  DrbgConfig drbg;

  std::optional<std::filesystem::path> output_path;
  std::optional<std::filesystem::path> report_path;
  std::optional<std::filesystem::path> intermediates_dir;
  bool keep_intermediates = false;
  bool insecure_fixtures = false;
};

/// Every key the configuration understands.
const std::vector<std::string>& config_keys();

/// `QRNG_` + key upper-cased with '.' replaced by '_', e.g. QRNG_SOURCE_RATE_HZ.
std::string env_var_for(const std::string& key);

/// Parses `key = value` lines; '#' starts a comment line.
KeyValues parse_config_text(std::istream& in);
KeyValues load_config_file(const std::filesystem::path& path);

/// Values for known keys found in the environment.
KeyValues environment_overrides();

/// Layers sources, later arguments winning: file < environment < flags.
KeyValues merge_config(const KeyValues& file, const KeyValues& env, const KeyValues& flags);

/// Builds and validates a configuration. Throws Validation listing every
/// violated invariant. Without insecure_fixtures, a fixed sim_seed or an
/// inline first column is rejected and the simulation seed is drawn from
/// std::random_device.
PipelineConfig build_config(const KeyValues& values, bool insecure_fixtures);

/// Returns every violated invariant (empty when valid).
std::vector<std::string> validation_errors(const PipelineConfig& config);

/// Min-entropy per bit of the configured extraction method, estimated on a
/// dedicated calibration run.
double calibrate_min_entropy(const PipelineConfig& config);

/// Toeplitz matrix from the params file, the inline fixture, or (default)
/// bootstrapped from a separate simulated chip.
ToeplitzMatrix make_toeplitz(const PipelineConfig& config);

/// Raw bits of one acquisition round: every chip extracted and concatenated
/// in chip order.
std::vector<Bits> acquire_round(const PipelineConfig& config, std::uint64_t round);

/// Live source of conditioned blocks. Each acquisition round yields every
/// complete n_cols block of its concatenated chip output.
class EntropySource {
 public:
  EntropySource(const PipelineConfig& config, const ToeplitzMatrix& matrix,
                double min_entropy_per_bit);

  /// Next raw block; throws SourceUnderrun when a round falls short or the
  /// round budget is exhausted.
  RawBitBlock next_raw_block();
  Bits next_conditioned_block();

  std::uint64_t rounds_used() const { return round_; }

 private:
  const PipelineConfig& config_;
  const ToeplitzMatrix& matrix_;
  double min_entropy_;
  std::uint64_t round_ = 0;
  Bits pending_;
  std::size_t pending_pos_ = 0;
};

enum class RunStatus { FullEntropy, Degraded };

const char* to_string(RunStatus status);

struct PipelineResult {
  Bytes output;
  EntReport report;
  RunStatus status = RunStatus::FullEntropy;
  double min_entropy_per_bit = 0.0;
  std::uint64_t requests = 0;
  std::uint64_t reseeds = 0;
  std::vector<std::string> warnings;
};

/// Report text: status, the ENT table, then the machine-readable lines.
std::string format_report(const PipelineResult& result);

/// simulate -> extract -> condition -> instantiate/generate -> evaluate, in memory.
/// Writes output/report/intermediates when the corresponding paths are set.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Individual stages over the documented file formats.
namespace stages {

/// Writes chip_000.qtik, chip_001.qtik, ... for round 0 into out_dir.
void simulate(const PipelineConfig& config, const std::filesystem::path& out_dir);

/// Reads the chip files, extracts and concatenates them, and keeps the
/// largest multiple of n_cols bits. Throws SourceUnderrun below n_cols.
Bits extract(const PipelineConfig& config, const std::filesystem::path& in_dir);

/// Conditions every complete raw block.
Bits condition(const PipelineConfig& config, const Bits& raw);

/// Instantiates from the first conditioned block and generates
/// drbg.total_bits. In prediction-resistance mode each request reseeds from
/// the next block and degrades to DRBG-only once the blocks run out.
PipelineResult drbg_gen(const PipelineConfig& config, const Bits& conditioned);

EntReport eval(std::span<const std::uint8_t> data);

}  // namespace stages

}  // namespace qrng
