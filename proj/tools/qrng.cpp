// Command-line front end for the enhanced-NRBG pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrng/cavp.hpp"
#include "qrng/error.hpp"
#include "qrng/formats.hpp"
#include "qrng/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 2, kIo = 3, kEntropy = 4 };

int exit_code_for(qrng::ErrorKind kind) {
  using qrng::ErrorKind;
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Format: return kIo;
    case ErrorKind::SourceUnderrun:
    case ErrorKind::InsufficientEntropy: return kEntropy;
    default: return kValidation;
  }
}

struct CommonOptions {
  std::string config_path;
  std::string out;
  std::string report;
  std::string in;
  unsigned workers = 0;
  std::string seed;
  bool keep_intermediates = false;
  bool insecure_fixtures = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "Key-value config file");
  app->add_option("--out", o.out, "Output path");
  app->add_option("--report", o.report, "Report path");
  app->add_option("--workers", o.workers, "DRBG worker threads");
  app->add_option("--seed", o.seed, "Simulation seed (fixture, needs --insecure-fixtures)");
  app->add_flag("--keep-intermediates", o.keep_intermediates, "Write stage artifacts");
  app->add_flag("--insecure-fixtures", o.insecure_fixtures,
                "Allow fixed simulation seeds and inline Toeplitz columns");
  app->add_option("--set", o.sets, "Override a config key (key=value), repeatable");
}

qrng::PipelineConfig resolve_config(const CommonOptions& o) {
  const qrng::KeyValues file =
      o.config_path.empty() ? qrng::KeyValues{} : qrng::load_config_file(o.config_path);
  qrng::KeyValues flags;
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      qrng::fail(qrng::ErrorKind::Validation, "--set expects key=value, got '" + s + "'");
    }
    flags[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!o.out.empty()) flags["output_path"] = o.out;
  if (!o.report.empty()) flags["report_path"] = o.report;
  if (o.workers != 0) flags["drbg.workers"] = std::to_string(o.workers);
  if (!o.seed.empty()) flags["source.sim_seed"] = o.seed;
  qrng::PipelineConfig config =
      qrng::build_config(qrng::merge_config(file, qrng::environment_overrides(), flags),
                         o.insecure_fixtures);
  config.keep_intermediates = o.keep_intermediates;
  return config;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) qrng::fail(qrng::ErrorKind::Validation, std::string(flag) + " is required");
}

void emit_report(const qrng::PipelineConfig& config, const qrng::PipelineResult& result) {
  if (!config.report_path) std::cout << qrng::format_report(result);
  if (result.status == qrng::RunStatus::Degraded) {
    std::cerr << "warning: entropy source failed; output produced in DRBG-only mode\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enhanced non-deterministic random bit generator"};
  app.require_subcommand(1);

  CommonOptions opts;
  bool text_ticks = false;
  std::string export_ascii, export_binary;

  auto* simulate = app.add_subcommand("simulate", "Simulate decay chips into tick files");
  add_common(simulate, opts);
  simulate->add_flag("--text", text_ticks, "Also write one decimal tick per line");

  auto* extract = app.add_subcommand("extract", "Extract raw bits from tick files");
  add_common(extract, opts);
  extract->add_option("--in", opts.in, "Directory of chip tick files")->required();

  auto* condition = app.add_subcommand("condition", "Toeplitz-condition raw bits");
  add_common(condition, opts);
  condition->add_option("--in", opts.in, "Raw QBIT file")->required();

  auto* drbg_gen = app.add_subcommand("drbg-gen", "Seed the Hash-DRBG and generate output");
  add_common(drbg_gen, opts);
  drbg_gen->add_option("--in", opts.in, "Conditioned QBIT file")->required();

  auto* eval = app.add_subcommand("eval", "Run the ENT battery on a byte file");
  add_common(eval, opts);
  eval->add_option("--in", opts.in, "Byte file")->required();
  eval->add_option("--export-ascii", export_ascii, "Write the bitstream as ASCII 0/1");
  eval->add_option("--export-binary", export_binary, "Write the bitstream as packed bytes");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage in memory");
  add_common(pipeline, opts);

  std::string rsp_path;
  auto* cavp = app.add_subcommand("cavp", "Check Hash_DRBG against a DRBGVS response file");
  cavp->add_option("rsp", rsp_path, "Response (.rsp) file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cavp->parsed()) {
      std::ifstream in(rsp_path);
      if (!in) qrng::fail(qrng::ErrorKind::Io, "cannot open '" + rsp_path + "'");
      std::size_t passed = 0, failed = 0, skipped = 0;
      for (const auto& group : qrng::parse_drbgvs(in)) {
        if (group.hash != "SHA-256") {
          skipped += group.cases.size();
          continue;
        }
        for (const auto& test : group.cases) {
          if (qrng::run_cavp_case(group, test) == test.returned_bits) {
            ++passed;
          } else {
            ++failed;
            std::cerr << "FAIL " << group.describe() << " COUNT=" << test.count << "\n";
          }
        }
      }
      std::cout << "passed=" << passed << " failed=" << failed << " skipped=" << skipped << "\n";
      return failed == 0 ? kOk : 1;
    }

    const qrng::PipelineConfig config = resolve_config(opts);

    if (simulate->parsed()) {
      require(opts.out, "--out");
      qrng::stages::simulate(config, opts.out);
      if (text_ticks) {
        for (std::uint32_t chip = 0; chip < config.source.chip_count; ++chip) {
          char name[32];
          std::snprintf(name, sizeof name, "chip_%03u", chip);
          const auto base = std::filesystem::path(opts.out) / name;
          std::ofstream txt(base.string() + ".txt");
          qrng::write_tick_stream_text(txt, qrng::load_tick_stream(base.string() + ".qtik"));
        }
      }
    } else if (extract->parsed()) {
      require(opts.out, "--out");
      qrng::save_packed_bits(opts.out, qrng::stages::extract(config, opts.in));
    } else if (condition->parsed()) {
      require(opts.out, "--out");
      qrng::save_packed_bits(opts.out,
                             qrng::stages::condition(config, qrng::load_packed_bits(opts.in)));
    } else if (drbg_gen->parsed()) {
      require(opts.out, "--out");
      const auto result = qrng::stages::drbg_gen(config, qrng::load_packed_bits(opts.in));
      emit_report(config, result);
    } else if (eval->parsed()) {
      const qrng::Bytes data = qrng::read_file(opts.in);
      qrng::PipelineResult result;
      result.report = qrng::stages::eval(data);
      const std::string text = qrng::format_ent_table(result.report) + "\n" +
                               qrng::format_ent_machine(result.report);
      if (config.report_path) qrng::write_text_file(*config.report_path, text);
      else std::cout << text;
      if (!export_ascii.empty() || !export_binary.empty()) {
        const qrng::Bits bits = qrng::unpack_bits(data);
        if (!export_ascii.empty()) {
          std::ofstream out(export_ascii, std::ios::binary);
          qrng::export_bits_ascii(out, bits);
        }
        if (!export_binary.empty()) {
          std::ofstream out(export_binary, std::ios::binary);
          qrng::export_bits_binary(out, bits);
        }
      }
    } else if (pipeline->parsed()) {
      emit_report(config, qrng::run_pipeline(config));
    }
    return kOk;
  } catch (const qrng::Error& e) {
    std::cerr << "error (" << qrng::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return kIo;
  }
}
