#include "qrng/rng_eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>

#include "qrng/error.hpp"

namespace qrng {

double chi_square_upper_tail(double x, double dof) {
  if (!(dof > 0.0)) fail(ErrorKind::InvalidArgument, "chi-square dof must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

std::array<std::uint64_t, 256> byte_histogram(std::span<const std::uint8_t> data) {
  // Four interleaved tables break the store-to-load dependency on runs of equal bytes.
  std::array<std::array<std::uint64_t, 256>, 4> partial{};
  const std::size_t n4 = data.size() / 4 * 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    ++partial[0][data[i]];
    ++partial[1][data[i + 1]];
    ++partial[2][data[i + 2]];
    ++partial[3][data[i + 3]];
  }
  for (std::size_t i = n4; i < data.size(); ++i) ++partial[0][data[i]];
  std::array<std::uint64_t, 256> counts{};
  for (const auto& p : partial) {
    for (std::size_t b = 0; b < 256; ++b) counts[b] += p[b];
  }
  return counts;
}

EntReport ent_report(std::span<const std::uint8_t> data) {
  if (data.size() < 6) {
    fail(ErrorKind::InvalidArgument, "ent_report: need at least 6 bytes, got " +
                                         std::to_string(data.size()));
  }
  EntReport r;
  const auto counts = byte_histogram(data);
  const double total = static_cast<double>(data.size());
  r.byte_count = data.size();

  const double expected = total / 256.0;
  unsigned __int128 sum = 0;
  for (std::size_t b = 0; b < 256; ++b) {
    const double c = static_cast<double>(counts[b]);
    const double diff = c - expected;
    r.chi_square_statistic += diff * diff / expected;
    sum += static_cast<unsigned __int128>(counts[b]) * b;
    if (counts[b] > 0) {
      const double p = c / total;
      r.entropy_bits_per_byte -= p * std::log2(p);
    }
  }
  r.compression_percent = static_cast<int>(100.0 * (8.0 - r.entropy_bits_per_byte) / 8.0);
  r.chi_square_exceed_percent = 100.0 * chi_square_upper_tail(r.chi_square_statistic, 255.0);
  r.arithmetic_mean = static_cast<double>(sum) / total;

  // Monte Carlo: 24-bit big-endian (x, y) from each complete 6-byte group.
  constexpr std::uint64_t kRadius = (std::uint64_t{1} << 24) - 1;
  constexpr std::uint64_t kInCircle = kRadius * kRadius;
  std::uint64_t inside = 0;
  const std::size_t points = data.size() / 6;
  for (std::size_t p = 0; p < points; ++p) {
    const std::uint8_t* g = data.data() + 6 * p;
    const std::uint64_t x = std::uint64_t{g[0]} << 16 | std::uint64_t{g[1]} << 8 | g[2];
    const std::uint64_t y = std::uint64_t{g[3]} << 16 | std::uint64_t{g[4]} << 8 | g[5];
    if (x * x + y * y <= kInCircle) ++inside;
  }
  r.monte_carlo_pi = 4.0 * static_cast<double>(inside) / static_cast<double>(points);
  r.pi_error_percent = 100.0 * std::abs(std::numbers::pi - r.monte_carlo_pi) / std::numbers::pi;

  // Serial correlation of consecutive bytes, last byte paired with the first.
  unsigned __int128 t1 = 0, t3 = 0;
  for (std::size_t i = 0; i + 1 < data.size(); ++i) t1 += std::uint64_t{data[i]} * data[i + 1];
  t1 += std::uint64_t{data.back()} * data.front();
  for (std::size_t b = 0; b < 256; ++b) t3 += static_cast<unsigned __int128>(counts[b]) * b * b;
  const auto n = static_cast<unsigned __int128>(data.size());
  const unsigned __int128 t2sq = sum * sum;
  const unsigned __int128 den = n * t3 - t2sq;
  if (den == 0) {
    r.serial_correlation = 0.0;
    r.serial_correlation_defined = false;
  } else {
    const double num = n * t1 >= t2sq ? static_cast<double>(n * t1 - t2sq)
                                      : -static_cast<double>(t2sq - n * t1);
    r.serial_correlation = num / static_cast<double>(den);
  }
  return r;
}

std::string format_ent_table(const EntReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "Entropy (bits per byte)\t%.6f\n"
                "Compression\t%d%%\n"
                "Chi-square distribution\t%.2f%%\n"
                "Arithmetic mean value\t%.4f\n"
                "Monte Carlo value for Pi\t%.9f\n",
                r.entropy_bits_per_byte, r.compression_percent, r.chi_square_exceed_percent,
                r.arithmetic_mean, r.monte_carlo_pi);
  std::string out = buf;
  out += "Serial correlation coefficient\t";
  if (r.serial_correlation_defined) {
    std::snprintf(buf, sizeof buf, "%.6f\n", r.serial_correlation);
    out += buf;
  } else {
    out += "undefined (all values equal)\n";
  }
  return out;
}

std::string format_ent_machine(const EntReport& r) {
  char buf[640];
  std::snprintf(buf, sizeof buf,
                "byte_count=%llu\n"
                "entropy_bits_per_byte=%.9f\n"
                "compression_percent=%d\n"
                "chi_square_statistic=%.6f\n"
                "chi_square_exceed_percent=%.6f\n"
                "arithmetic_mean=%.9f\n"
                "monte_carlo_pi=%.9f\n"
                "pi_error_percent=%.6f\n"
                "serial_correlation=%.9f\n"
                "serial_correlation_defined=%d\n",
                static_cast<unsigned long long>(r.byte_count), r.entropy_bits_per_byte,
                r.compression_percent, r.chi_square_statistic, r.chi_square_exceed_percent,
                r.arithmetic_mean, r.monte_carlo_pi, r.pi_error_percent, r.serial_correlation,
                r.serial_correlation_defined ? 1 : 0);
  return buf;
}

namespace {

class PackedBits {
 public:
  explicit PackedBits(std::span<const std::uint8_t> bits)
      : size_(bits.size()), words_(bits.size() / 64 + 2, 0) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] & 1u) words_[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }

  // 64 bits starting at position pos; positions past the end read as 0.
  std::uint64_t word_at(std::size_t pos) const {
    const std::size_t q = pos / 64, r = pos % 64;
    if (r == 0) return words_[q];
    return (words_[q] >> r) | (words_[q + 1] << (64 - r));
  }

  // Number of ones in [begin, begin + len).
  std::uint64_t ones(std::size_t begin, std::size_t len) const { return dot(begin, begin, len); }

  // Number of positions i in [0, len) with bit(a + i) & bit(b + i).
  std::uint64_t dot(std::size_t a, std::size_t b, std::size_t len) const {
    std::uint64_t total = 0;
    std::size_t i = 0;
    for (; i + 64 <= len; i += 64) total += std::popcount(word_at(a + i) & word_at(b + i));
    if (i < len) {
      const std::uint64_t mask = (std::uint64_t{1} << (len - i)) - 1;
      total += std::popcount(word_at(a + i) & word_at(b + i) & mask);
    }
    return total;
  }

  std::size_t size() const { return size_; }

 private:
  std::size_t size_;
  std::vector<std::uint64_t> words_;
};

}  // namespace

AutocorrSeries autocorrelation(std::span<const std::uint8_t> bits, std::size_t max_lag) {
  if (bits.size() <= max_lag) {
    fail(ErrorKind::InvalidArgument, "autocorrelation: sequence must be longer than max_lag");
  }
  const PackedBits packed(bits);
  const std::uint64_t total_ones = packed.ones(0, bits.size());
  if (total_ones == 0 || total_ones == bits.size()) {
    fail(ErrorKind::ZeroVariance, "autocorrelation: sequence is constant");
  }

  AutocorrSeries series;
  series.coefficients.resize(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    const std::size_t len = bits.size() - k;
    const double n = static_cast<double>(len);
    const double sa = static_cast<double>(packed.ones(0, len));
    const double sb = static_cast<double>(packed.ones(k, len));
    const double sab = static_cast<double>(packed.dot(0, k, len));
    // bits are 0/1, so sum(a^2) = sum(a)
    const double cov = n * sab - sa * sb;
    const double va = n * sa - sa * sa;
    const double vb = n * sb - sb * sb;
    series.coefficients[k] = (va > 0.0 && vb > 0.0) ? cov / std::sqrt(va * vb) : 0.0;
  }
  series.coefficients[0] = 1.0;
  return series;
}

double min_entropy_mcv(std::span<const std::uint8_t> bits, std::size_t block_bits) {
  if (block_bits == 0 || block_bits > 32) {
    fail(ErrorKind::InvalidArgument, "min_entropy_mcv: block size must be 1..32 bits");
  }
  const std::size_t blocks = bits.size() / block_bits;
  if (blocks < 1000) {
    fail(ErrorKind::InsufficientData,
         "min_entropy_mcv: need at least 1000 blocks, got " + std::to_string(blocks));
  }
  std::uint64_t max_count = 0;
  auto symbol = [&](std::size_t b) {
    std::uint32_t s = 0;
    for (std::size_t i = 0; i < block_bits; ++i) s = (s << 1) | (bits[b * block_bits + i] & 1u);
    return s;
  };
  if (block_bits <= 20) {
    std::vector<std::uint64_t> counts(std::size_t{1} << block_bits, 0);
    for (std::size_t b = 0; b < blocks; ++b) ++counts[symbol(b)];
    max_count = *std::max_element(counts.begin(), counts.end());
  } else {
    std::unordered_map<std::uint32_t, std::uint64_t> counts;
    for (std::size_t b = 0; b < blocks; ++b) max_count = std::max(max_count, ++counts[symbol(b)]);
  }
  const double n = static_cast<double>(blocks);
  const double p_hat = static_cast<double>(max_count) / n;
  const double p_u = std::min(1.0, p_hat + 2.576 * std::sqrt(p_hat * (1.0 - p_hat) / (n - 1.0)));
  return -std::log2(p_u) / static_cast<double>(block_bits);
}

double monobit_p(std::span<const std::uint8_t> bits) {
  if (bits.size() < 100) {
    fail(ErrorKind::InsufficientData, "monobit_p: need at least 100 bits");
  }
  const auto ones = static_cast<std::int64_t>(std::count_if(
      bits.begin(), bits.end(), [](std::uint8_t b) { return (b & 1u) != 0; }));
  const auto n = static_cast<std::int64_t>(bits.size());
  const double s_obs = static_cast<double>(std::llabs(2 * ones - n)) / std::sqrt(static_cast<double>(n));
  return std::erfc(s_obs / std::numbers::sqrt2);
}

double runs_p(std::span<const std::uint8_t> bits) {
  if (bits.size() < 100) {
    fail(ErrorKind::InsufficientData, "runs_p: need at least 100 bits");
  }
  const double n = static_cast<double>(bits.size());
  const auto ones = std::count_if(bits.begin(), bits.end(),
                                  [](std::uint8_t b) { return (b & 1u) != 0; });
  const double pi = static_cast<double>(ones) / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
    fail(ErrorKind::InvalidArgument, "runs_p: frequency pre-test failed, runs test not applicable");
  }
  std::uint64_t runs = 1;
  for (std::size_t i = 1; i < bits.size(); ++i) {
    if ((bits[i] & 1u) != (bits[i - 1] & 1u)) ++runs;
  }
  const double v = static_cast<double>(runs);
  const double q = pi * (1.0 - pi);
  return std::erfc(std::abs(v - 2.0 * n * q) / (2.0 * std::sqrt(2.0 * n) * q));
}

double fisher_combine(std::span<const double> pvalues) {
  if (pvalues.empty()) fail(ErrorKind::InvalidArgument, "fisher_combine: no p-values");
  double x = 0.0;
  for (double p : pvalues) {
    if (!(p > 0.0 && p <= 1.0)) {
      fail(ErrorKind::InvalidArgument, "fisher_combine: p-values must lie in (0, 1]");
    }
    x -= 2.0 * std::log(p);
  }
  return chi_square_upper_tail(x, 2.0 * static_cast<double>(pvalues.size()));
}

}  // namespace qrng
