#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrng {

/// Results of the five ENT tests on a byte stream, computed the way the
/// classic `ent` tool computes them.
struct EntReport {
  std::uint64_t byte_count = 0;
  double entropy_bits_per_byte = 0.0;
  /// Integer percent, truncated: (int)(100 * (8 - entropy) / 8).
  int compression_percent = 0;
  double chi_square_statistic = 0.0;
  /// Upper-tail probability of the statistic under chi-square(255), in percent.
  double chi_square_exceed_percent = 0.0;
  double arithmetic_mean = 0.0;
  double monte_carlo_pi = 0.0;
  double pi_error_percent = 0.0;
  /// Zero when undefined; see serial_correlation_defined.
  double serial_correlation = 0.0;
  bool serial_correlation_defined = true;
};

/// Throws InvalidArgument for fewer than 6 bytes.
EntReport ent_report(std::span<const std::uint8_t> data);

/// Table-style text using the classic row names, one row per line.
std::string format_ent_table(const EntReport& report);
/// One `name=value` line per metric.
std::string format_ent_machine(const EntReport& report);

/// Pearson correlation of the sequence with its lag-k shift, k = 0..max_lag.
struct AutocorrSeries {
  std::vector<double> coefficients;

  std::size_t max_lag() const { return coefficients.size() - 1; }
  double at(std::size_t lag) const { return coefficients.at(lag); }
};

/// Throws ZeroVariance for a constant sequence and InvalidArgument unless
/// bits.size() > max_lag.
AutocorrSeries autocorrelation(std::span<const std::uint8_t> bits, std::size_t max_lag);

std::array<std::uint64_t, 256> byte_histogram(std::span<const std::uint8_t> data);

/// Most-common-value min-entropy per bit over non-overlapping blocks of
/// block_bits bits, with a 99% upper bound on the modal probability.
/// Throws InsufficientData for fewer than 1000 blocks.
double min_entropy_mcv(std::span<const std::uint8_t> bits, std::size_t block_bits);

/// Frequency (monobit) test p-value. Requires at least 100 bits.
double monobit_p(std::span<const std::uint8_t> bits);

/// Runs test p-value. Throws InvalidArgument when the frequency pre-test
/// |ones/n - 1/2| < 2/sqrt(n) fails.
double runs_p(std::span<const std::uint8_t> bits);

/// Fisher's method: upper tail of chi-square(2k) at -2 * sum(ln p_i).
double fisher_combine(std::span<const double> pvalues);

/// Upper-tail probability Q(dof/2, x/2) of the chi-square distribution.
double chi_square_upper_tail(double x, double dof);

}  // namespace qrng
