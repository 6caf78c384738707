#include "qrng/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "qrng/error.hpp"
#include "qrng/formats.hpp"

namespace qrng {

namespace {

constexpr std::uint64_t kCalibrationTag = 0x43414c4942524154ull;  // "CALIBRAT"
constexpr std::uint64_t kBootstrapTag = 0x544f45504c49545aull;    // "TOEPLITZ"

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string chip_file_name(std::uint32_t chip) {
  char name[32];
  std::snprintf(name, sizeof name, "chip_%03u.qtik", chip);
  return name;
}

// Collects parse failures instead of stopping at the first one.
class ConfigReader {
 public:
  ConfigReader(const KeyValues& values, std::vector<std::string>& errors)
      : values_(values), errors_(errors) {}

  const std::string* find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  template <typename T>
  void number(const std::string& key, T& out) {
    const std::string* v = find(key);
    if (v == nullptr) return;
    T parsed{};
    const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
    if (ec != std::errc() || p != v->data() + v->size()) {
      errors_.push_back(key + ": cannot parse '" + *v + "' as a number");
      return;
    }
    out = parsed;
  }

  void real(const std::string& key, double& out) {
    const std::string* v = find(key);
    if (v == nullptr) return;
    char* end = nullptr;
    const double parsed = std::strtod(v->c_str(), &end);
    if (v->empty() || end != v->c_str() + v->size() || !std::isfinite(parsed)) {
      errors_.push_back(key + ": cannot parse '" + *v + "' as a real number");
      return;
    }
    out = parsed;
  }

  void boolean(const std::string& key, bool& out) {
    const std::string* v = find(key);
    if (v == nullptr) return;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "1" || s == "true" || s == "yes" || s == "on") out = true;
    else if (s == "0" || s == "false" || s == "no" || s == "off") out = false;
    else errors_.push_back(key + ": cannot parse '" + *v + "' as a boolean");
  }

 private:
  const KeyValues& values_;
  std::vector<std::string>& errors_;
};

Bits bootstrap_first_column(const PipelineConfig& config) {
  SourceConfig boot = config.source;
  boot.chip_count = 1;
  boot.sim_seed = mix_seed(config.source.sim_seed ^ kBootstrapTag);
  double duration = config.duration_s;
  for (int attempt = 0; attempt < 40; ++attempt, duration *= 2.0) {
    Bits bits = extract(simulate_chip(boot, duration, 0), config.method, config.window_ticks,
                        config.invert_compare);
    if (bits.size() >= config.n_rows) {
      bits.resize(config.n_rows);
      if (std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; })) return bits;
    }
  }
  fail(ErrorKind::SourceUnderrun, "could not bootstrap a nonzero Toeplitz first column");
}

EntropyInput entropy_from_block(const Bits& conditioned) {
  return EntropyInput::from_hex(bits_to_hex(conditioned));
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "source.rate_hz",         "source.resolution_s",   "source.chip_count",
      "source.sim_seed",        "source.duration_s",     "source.calibration_s",
      "source.max_rounds",      "extract.method",        "extract.window_ticks",
      "extract.invert_compare", "extract.mcv_block_bits", "toeplitz.params_path",
      "toeplitz.n_rows",        "toeplitz.n_cols",       "toeplitz.taps",
      "toeplitz.first_column",  "drbg.request_bits",     "drbg.total_bits",
      "drbg.workers",           "drbg.reseed_interval",  "drbg.prediction_resistance",
      "output_path",            "report_path",           "intermediates_dir",
  };
  return keys;
}

std::string env_var_for(const std::string& key) {
  std::string name = "QRNG_";
  for (char c : key) {
    name.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return name;
}

KeyValues parse_config_text(std::istream& in) {
  KeyValues values;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::string text = trim(line);
    if (!text.empty() && text.front() != '#') {
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw FormatError("config line is not key = value", offset);
      const std::string key = trim(std::string_view(text).substr(0, eq));
      if (key.empty()) throw FormatError("config line has an empty key", offset);
      values[key] = trim(std::string_view(text).substr(eq + 1));
    }
    offset += line.size() + 1;
  }
  return values;
}

KeyValues load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path.string() + "'");
  try {
    return parse_config_text(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

KeyValues environment_overrides() {
  KeyValues values;
  for (const std::string& key : config_keys()) {
    if (const char* v = std::getenv(env_var_for(key).c_str())) values[key] = v;
  }
  return values;
}

KeyValues merge_config(const KeyValues& file, const KeyValues& env, const KeyValues& flags) {
  KeyValues merged = file;
  for (const auto& [k, v] : env) merged[k] = v;
  for (const auto& [k, v] : flags) merged[k] = v;
  return merged;
}

std::vector<std::string> validation_errors(const PipelineConfig& c) {
  std::vector<std::string> e;
  const auto& s = c.source;
  if (!(s.rate_hz > 0.0)) e.push_back("source.rate_hz must be positive");
  if (!(s.resolution_s > 0.0)) e.push_back("source.resolution_s must be positive");
  if (s.chip_count < 1) e.push_back("source.chip_count must be at least 1");
  if (!(s.rate_hz * s.resolution_s < 0.5)) {
    e.push_back("source.rate_hz * source.resolution_s must be below 0.5");
  }
  if (!(c.duration_s > 0.0)) e.push_back("source.duration_s must be positive");
  if (!(c.calibration_s > 0.0)) e.push_back("source.calibration_s must be positive");
  if (c.window_ticks < 1) e.push_back("extract.window_ticks must be at least 1");
  if (c.mcv_block_bits < 1 || c.mcv_block_bits > 20) {
    e.push_back("extract.mcv_block_bits must lie in 1..20");
  }
  if (c.n_rows == 0 || c.n_rows >= c.n_cols) e.push_back("toeplitz.n_rows must be in 1..n_cols-1");
  if (c.n_rows % 4 != 0) e.push_back("toeplitz.n_rows must be a multiple of 4 (hex seed encoding)");
  if (c.taps.empty() || *std::max_element(c.taps.begin(), c.taps.end()) != c.n_rows) {
    e.push_back("toeplitz.taps must have degree equal to toeplitz.n_rows");
  }
  if (c.first_column) {
    if (c.first_column->size() != c.n_rows) {
      e.push_back("toeplitz.first_column must have n_rows bits");
    }
    if (std::none_of(c.first_column->begin(), c.first_column->end(),
                     [](std::uint8_t b) { return b != 0; })) {
      e.push_back("toeplitz.first_column must not be all zero");
    }
  }
  if (c.n_rows < drbg::kSecurityStrength) {
    e.push_back("toeplitz.n_rows must be at least 256 to seed the DRBG");
  }
  const auto& d = c.drbg;
  if (d.request_bits == 0 || d.request_bits % 8 != 0 || d.request_bits > drbg::kMaxBitsPerRequest) {
    e.push_back("drbg.request_bits must be a positive multiple of 8 no larger than 2^19");
  }
  if (d.total_bits == 0 || (d.request_bits != 0 && d.total_bits % d.request_bits != 0)) {
    e.push_back("drbg.total_bits must be a positive multiple of drbg.request_bits");
  }
  if (d.workers < 1) e.push_back("drbg.workers must be at least 1");
  if (d.reseed_interval < 1) e.push_back("drbg.reseed_interval must be at least 1");
  if (d.request_bits != 0 && d.total_bits / d.request_bits > d.reseed_interval) {
    e.push_back("drbg.total_bits must not exceed drbg.request_bits * drbg.reseed_interval");
  }
  return e;
}

PipelineConfig build_config(const KeyValues& values, bool insecure_fixtures) {
  std::vector<std::string> errors;
  for (const auto& [key, value] : values) {
    const auto& known = config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      errors.push_back("unknown config key '" + key + "'");
    }
  }

  PipelineConfig c;
  c.insecure_fixtures = insecure_fixtures;
  c.drbg.workers = std::max(1u, std::thread::hardware_concurrency());
  ConfigReader r(values, errors);
  r.real("source.rate_hz", c.source.rate_hz);
  r.real("source.resolution_s", c.source.resolution_s);
  r.number("source.chip_count", c.source.chip_count);
  r.real("source.duration_s", c.duration_s);
  r.real("source.calibration_s", c.calibration_s);
  r.number("source.max_rounds", c.max_rounds);
  if (r.find("source.sim_seed")) {
    if (!insecure_fixtures) {
      errors.push_back("source.sim_seed is a fixture seed; pass --insecure-fixtures to use it");
    }
    r.number("source.sim_seed", c.source.sim_seed);
  } else {
    std::random_device rd;
    c.source.sim_seed = (std::uint64_t{rd()} << 32) ^ rd();
  }

  if (const std::string* m = r.find("extract.method")) {
    try {
      c.method = parse_extraction_method(*m);
    } catch (const Error& e) {
      errors.push_back(std::string("extract.method: ") + e.what());
    }
  }
  r.number("extract.window_ticks", c.window_ticks);
  r.boolean("extract.invert_compare", c.invert_compare);
  r.number("extract.mcv_block_bits", c.mcv_block_bits);

  if (const std::string* p = r.find("toeplitz.params_path")) {
    c.toeplitz_params_path = *p;
    try {
      const ToeplitzParams params = load_toeplitz_params(*p);
      c.n_rows = params.n_rows;
      c.n_cols = params.n_cols;
      c.taps = params.polynomial_taps;
    } catch (const Error& e) {
      errors.push_back(std::string("toeplitz.params_path: ") + e.what());
    }
  }
  r.number("toeplitz.n_rows", c.n_rows);
  r.number("toeplitz.n_cols", c.n_cols);
  if (const std::string* t = r.find("toeplitz.taps")) {
    c.taps.clear();
    std::string list = *t;
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream ss(list);
    unsigned tap = 0;
    while (ss >> tap) c.taps.push_back(tap);
    if (!ss.eof()) errors.push_back("toeplitz.taps: expected decimal exponents");
  }
  if (const std::string* fc = r.find("toeplitz.first_column")) {
    if (!insecure_fixtures) {
      errors.push_back("toeplitz.first_column is a fixture; pass --insecure-fixtures to use it");
    }
    try {
      Bits bits = hex_to_bits(*fc);
      if (bits.size() >= c.n_rows) bits.resize(c.n_rows);
      c.first_column = std::move(bits);
    } catch (const Error& e) {
      errors.push_back(std::string("toeplitz.first_column: ") + e.what());
    }
  }

  r.number("drbg.request_bits", c.drbg.request_bits);
  r.number("drbg.total_bits", c.drbg.total_bits);
  r.number("drbg.workers", c.drbg.workers);
  r.number("drbg.reseed_interval", c.drbg.reseed_interval);
  r.boolean("drbg.prediction_resistance", c.drbg.prediction_resistance);

  if (const std::string* p = r.find("output_path")) c.output_path = *p;
  if (const std::string* p = r.find("report_path")) c.report_path = *p;
  if (const std::string* p = r.find("intermediates_dir")) c.intermediates_dir = *p;

  for (std::string& v : validation_errors(c)) errors.push_back(std::move(v));
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& err : errors) msg += "\n  - " + err;
    fail(ErrorKind::Validation, msg);
  }
  return c;
}

double calibrate_min_entropy(const PipelineConfig& config) {
  SourceConfig cal = config.source;
  cal.sim_seed = mix_seed(config.source.sim_seed ^ kCalibrationTag);
  Bits bits;
  for (const TickStream& s : simulate_chips(cal, config.calibration_s)) {
    const Bits b = extract(s, config.method, config.window_ticks, config.invert_compare);
    bits.insert(bits.end(), b.begin(), b.end());
  }
  return min_entropy_mcv(bits, config.mcv_block_bits);
}

ToeplitzMatrix make_toeplitz(const PipelineConfig& config) {
  ToeplitzParams params;
  if (config.toeplitz_params_path) {
    params = load_toeplitz_params(*config.toeplitz_params_path);
  } else {
    params.n_rows = config.n_rows;
    params.n_cols = config.n_cols;
    params.polynomial_taps = config.taps;
    params.first_column = config.first_column ? *config.first_column : bootstrap_first_column(config);
  }
  return ToeplitzMatrix(params);
}

std::vector<Bits> acquire_round(const PipelineConfig& config, std::uint64_t round) {
  SourceConfig sc = config.source;
  sc.sim_seed = round_seed(config.source.sim_seed, round);
  std::vector<Bits> out;
  for (const TickStream& s : simulate_chips(sc, config.duration_s)) {
    out.push_back(extract(s, config.method, config.window_ticks, config.invert_compare));
  }
  return out;
}

EntropySource::EntropySource(const PipelineConfig& config, const ToeplitzMatrix& matrix,
                             double min_entropy_per_bit)
    : config_(config), matrix_(matrix), min_entropy_(min_entropy_per_bit) {}

RawBitBlock EntropySource::next_raw_block() {
  const std::size_t n = config_.n_cols;
  if (pending_.size() - pending_pos_ < n) {
    if (config_.max_rounds != 0 && round_ >= config_.max_rounds) {
      fail(ErrorKind::SourceUnderrun, "entropy source failed: acquisition round budget exhausted");
    }
    const std::vector<Bits> chips = acquire_round(config_, round_++);
    std::size_t available = 0;
    for (const Bits& b : chips) available += b.size();
    // assemble_block throws the underrun when the round is short.
    const RawBitBlock all = assemble_block(chips, std::max(n, available / n * n), config_.method,
                                           min_entropy_);
    pending_ = all.bits;
    pending_pos_ = 0;
  }
  RawBitBlock block;
  block.source_method = config_.method;
  block.min_entropy_per_bit = min_entropy_;
  block.bits.assign(pending_.begin() + static_cast<std::ptrdiff_t>(pending_pos_),
                    pending_.begin() + static_cast<std::ptrdiff_t>(pending_pos_ + n));
  pending_pos_ += n;
  return block;
}

Bits EntropySource::next_conditioned_block() { return condition(matrix_, next_raw_block().bits); }

const char* to_string(RunStatus status) {
  return status == RunStatus::FullEntropy ? "full-entropy" : "degraded: DRBG-only";
}

std::string format_report(const PipelineResult& result) {
  std::string out = "status: ";
  out += to_string(result.status);
  out += "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "raw min-entropy per bit (MCV): %.4f\n", result.min_entropy_per_bit);
  out += buf;
  for (const auto& w : result.warnings) out += "warning: " + w + "\n";
  out += "\n";
  out += format_ent_table(result.report);
  out += "\n";
  out += std::string("status=") + to_string(result.status) + "\n";
  std::snprintf(buf, sizeof buf, "min_entropy_per_bit=%.6f\nrequests=%llu\nreseeds=%llu\n",
                result.min_entropy_per_bit, static_cast<unsigned long long>(result.requests),
                static_cast<unsigned long long>(result.reseeds));
  out += buf;
  out += format_ent_machine(result.report);
  return out;
}

namespace {

void finish(const PipelineConfig& config, PipelineResult& result) {
  if (result.output.size() >= 6) result.report = ent_report(result.output);
  if (config.output_path) write_file(*config.output_path, result.output);
  if (config.report_path) write_text_file(*config.report_path, format_report(result));
}

// Generates drbg.total_bits; `next_entropy` supplies reseed material in
// prediction-resistance mode and throws SourceUnderrun when exhausted.
template <typename NextEntropy>
void generate_output(const PipelineConfig& config, DrbgState& state, NextEntropy&& next_entropy,
                     PipelineResult& result) {
  const auto& d = config.drbg;
  result.requests = d.total_bits / d.request_bits;
  if (!d.prediction_resistance) {
    result.output = generate_bulk(state, d.total_bits, d.request_bits, d.workers);
    return;
  }
  result.output.reserve(static_cast<std::size_t>(d.total_bits / 8));
  for (std::uint64_t r = 0; r < result.requests; ++r) {
    if (result.status == RunStatus::FullEntropy) {
      try {
        reseed(state, next_entropy());
        ++result.reseeds;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SourceUnderrun) throw;
        result.status = RunStatus::Degraded;
        result.warnings.push_back(std::string("entropy source failed at request ") +
                                  std::to_string(r) + ", continuing as DRBG only: " + e.what());
      }
    }
    const Bytes chunk = generate(state, d.request_bits);
    result.output.insert(result.output.end(), chunk.begin(), chunk.end());
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  if (auto errors = validation_errors(config); !errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& err : errors) msg += "\n  - " + err;
    fail(ErrorKind::Validation, msg);
  }
  PipelineResult result;
  result.min_entropy_per_bit = calibrate_min_entropy(config);
  if (result.min_entropy_per_bit * static_cast<double>(config.n_cols) <
      static_cast<double>(config.n_rows)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "estimated raw min-entropy %.1f bits per block is below the %zu conditioned bits",
                  result.min_entropy_per_bit * static_cast<double>(config.n_cols), config.n_rows);
    result.warnings.emplace_back(buf);
  }

  const ToeplitzMatrix matrix = make_toeplitz(config);
  EntropySource source(config, matrix, result.min_entropy_per_bit);
  // A failure here leaves no state to fall back on.
  DrbgState state = instantiate(entropy_from_block(source.next_conditioned_block()), {}, {},
                                config.drbg.reseed_interval);

  generate_output(config, state, [&] { return entropy_from_block(source.next_conditioned_block()); },
                  result);

  if (config.keep_intermediates) {
    const std::filesystem::path dir =
        config.intermediates_dir ? *config.intermediates_dir
        : config.output_path     ? std::filesystem::path(config.output_path->string() + ".stages")
                                 : std::filesystem::path("qrng-stages");
    std::filesystem::create_directories(dir);
    stages::simulate(config, dir / "ticks");
    const Bits raw = stages::extract(config, dir / "ticks");
    save_packed_bits(dir / "raw.qbit", raw);
    save_packed_bits(dir / "conditioned.qbit", stages::condition(config, raw));
  }
  finish(config, result);
  return result;
}

namespace stages {

void simulate(const PipelineConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SourceConfig sc = config.source;
  sc.sim_seed = round_seed(config.source.sim_seed, 0);
  const auto streams = simulate_chips(sc, config.duration_s);
  for (std::uint32_t chip = 0; chip < streams.size(); ++chip) {
    save_tick_stream(out_dir / chip_file_name(chip), streams[chip]);
  }
}

Bits extract(const PipelineConfig& config, const std::filesystem::path& in_dir) {
  std::vector<Bits> chips;
  for (std::uint32_t chip = 0; chip < config.source.chip_count; ++chip) {
    const TickStream s = load_tick_stream(in_dir / chip_file_name(chip));
    chips.push_back(qrng::extract(s, config.method, config.window_ticks, config.invert_compare));
  }
  std::size_t available = 0;
  for (const Bits& b : chips) available += b.size();
  const std::size_t n = config.n_cols;
  return assemble_block(chips, std::max(n, available / n * n), config.method, 1.0).bits;
}

Bits condition(const PipelineConfig& config, const Bits& raw) {
  if (raw.size() < config.n_cols) {
    fail(ErrorKind::SourceUnderrun, "condition: input holds " + std::to_string(raw.size()) +
                                        " bits, fewer than one " + std::to_string(config.n_cols) +
                                        "-bit block");
  }
  return condition_stream(make_toeplitz(config), raw);
}

PipelineResult drbg_gen(const PipelineConfig& config, const Bits& conditioned) {
  const std::size_t n = config.n_rows;
  const std::size_t blocks = conditioned.size() / n;
  if (blocks == 0) {
    fail(ErrorKind::SourceUnderrun, "drbg-gen: no complete conditioned block to instantiate from");
  }
  auto block = [&](std::size_t i) {
    return Bits(conditioned.begin() + static_cast<std::ptrdiff_t>(i * n),
                conditioned.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  };
  PipelineResult result;
  result.min_entropy_per_bit = 0.0;
  DrbgState state = instantiate(entropy_from_block(block(0)), {}, {}, config.drbg.reseed_interval);
  std::size_t next = 1;
  generate_output(
      config, state,
      [&] {
        if (next >= blocks) {
          fail(ErrorKind::SourceUnderrun, "conditioned input exhausted");
        }
        return entropy_from_block(block(next++));
      },
      result);
  finish(config, result);
  return result;
}

EntReport eval(std::span<const std::uint8_t> data) { return ent_report(data); }

}  // namespace stages

}  // namespace qrng
