#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "qrng/bits.hpp"
#include "qrng/error.hpp"
#include "qrng/rng_eval.hpp"

using namespace qrng;

namespace {

Bytes random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

Bits alternating(std::size_t n) {
  Bits b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(i & 1u);
  return b;
}

// Straight double-precision transcription of the classic tool's formulas.
struct NaiveEnt {
  double entropy = 0, chi = 0, mean = 0, pi = 0, scc = 0;
};

NaiveEnt naive_ent(const Bytes& d) {
  NaiveEnt r;
  std::vector<double> count(256, 0.0);
  for (auto b : d) count[b] += 1.0;
  const double n = static_cast<double>(d.size());
  for (double c : count) {
    if (c > 0) r.entropy -= c / n * std::log2(c / n);
    r.chi += (c - n / 256) * (c - n / 256) / (n / 256);
  }
  r.mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  std::size_t inside = 0, points = 0;
  const double radius = std::pow(256.0, 3) - 1;
  for (std::size_t i = 0; i + 6 <= d.size(); i += 6) {
    double x = 0, y = 0;
    for (int k = 0; k < 3; ++k) x = x * 256 + d[i + k];
    for (int k = 3; k < 6; ++k) y = y * 256 + d[i + k];
    ++points;
    if (x * x + y * y <= radius * radius) ++inside;
  }
  r.pi = 4.0 * inside / points;
  double t1 = 0, t2 = 0, t3 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double u = d[i], v = d[(i + 1) % d.size()];
    t1 += u * v;
    t2 += u;
    t3 += u * u;
  }
  r.scc = (n * t1 - t2 * t2) / (n * t3 - t2 * t2);
  return r;
}

}  // namespace

TEST_CASE("ENT on a permutation of all byte values") {
  Bytes d(256);
  std::iota(d.begin(), d.end(), 0);
  const EntReport r = ent_report(d);
  CHECK(r.entropy_bits_per_byte == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(r.compression_percent == 0);
  CHECK(r.chi_square_statistic == 0.0);
  CHECK(r.arithmetic_mean == 127.5);
  CHECK(r.chi_square_exceed_percent == doctest::Approx(100.0));
}

TEST_CASE("ENT on all zeros") {
  const Bytes d(1 << 20, 0);
  const EntReport r = ent_report(d);
  CHECK(r.entropy_bits_per_byte == 0.0);
  CHECK(r.compression_percent == 100);
  CHECK(r.monte_carlo_pi == 4.0);
  CHECK_FALSE(r.serial_correlation_defined);
  CHECK(r.arithmetic_mean == 0.0);
}

TEST_CASE("ENT matches the naive transcription") {
  for (std::size_t n : {6u, 1000u, 65537u, 1000000u}) {
    CAPTURE(n);
    const Bytes d = random_bytes(n, n);
    const EntReport r = ent_report(d);
    const NaiveEnt o = naive_ent(d);
    CHECK(r.byte_count == n);
    CHECK(r.entropy_bits_per_byte == doctest::Approx(o.entropy).epsilon(1e-12));
    CHECK(r.chi_square_statistic == doctest::Approx(o.chi).epsilon(1e-9));
    CHECK(r.arithmetic_mean == doctest::Approx(o.mean).epsilon(1e-12));
    CHECK(r.monte_carlo_pi == doctest::Approx(o.pi).epsilon(1e-12));
    CHECK(r.serial_correlation == doctest::Approx(o.scc).epsilon(1e-9));
    CHECK(r.compression_percent == static_cast<int>(100 * (8 - r.entropy_bits_per_byte) / 8));
    CHECK(r.pi_error_percent == doctest::Approx(100 * std::abs(r.monte_carlo_pi - M_PI) / M_PI));
    CHECK(r.chi_square_exceed_percent ==
          doctest::Approx(100 * chi_square_upper_tail(r.chi_square_statistic, 255)).epsilon(1e-6));
  }
  CHECK_THROWS(ent_report(Bytes(5, 1)));
}

TEST_CASE("ENT permutation invariants") {
  Bytes d = random_bytes(100000, 4);
  const EntReport a = ent_report(d);
  std::shuffle(d.begin(), d.end(), std::mt19937_64(5));
  const EntReport b = ent_report(d);
  CHECK(a.entropy_bits_per_byte == doctest::Approx(b.entropy_bits_per_byte).epsilon(1e-12));
  CHECK(a.chi_square_statistic == doctest::Approx(b.chi_square_statistic).epsilon(1e-12));
  CHECK(a.arithmetic_mean == b.arithmetic_mean);
  CHECK(byte_histogram(d) == byte_histogram(random_bytes(100000, 4)));
  CHECK(a.entropy_bits_per_byte <= 8.0);
}

TEST_CASE("ENT text output") {
  const EntReport r = ent_report(random_bytes(4096, 1));
  const std::string table = format_ent_table(r);
  for (const char* row : {"Entropy (bits per byte)", "Compression", "Chi-square distribution",
                          "Arithmetic mean value", "Monte Carlo value for Pi",
                          "Serial correlation coefficient"}) {
    CHECK(table.find(row) != std::string::npos);
  }
  CHECK(format_ent_machine(r).find("entropy_bits_per_byte=") != std::string::npos);
}

TEST_CASE("byte histogram") {
  const auto h = byte_histogram(Bytes{0x00, 0x00, 0xff});
  CHECK(h[0] == 2);
  CHECK(h[255] == 1);
  CHECK(std::accumulate(h.begin(), h.end(), std::uint64_t{0}) == 3);
  const auto e = byte_histogram(Bytes{});
  CHECK(std::all_of(e.begin(), e.end(), [](auto c) { return c == 0; }));
  const Bytes d = random_bytes(12345, 8);
  std::array<std::uint64_t, 256> naive{};
  for (auto b : d) ++naive[b];
  CHECK(byte_histogram(d) == naive);
}

TEST_CASE("autocorrelation") {
  const AutocorrSeries a = autocorrelation(alternating(1000), 3);
  CHECK(a.max_lag() == 3);
  CHECK(a.at(0) == doctest::Approx(1.0));
  CHECK(a.at(1) == doctest::Approx(-1.0).epsilon(1e-2));
  CHECK(a.at(2) == doctest::Approx(1.0).epsilon(1e-2));

  const Bits r = unpack_bits(random_bytes(125000, 3));
  const AutocorrSeries s = autocorrelation(r, 20);
  CHECK(s.at(0) == doctest::Approx(1.0));
  // Naive Pearson at lag 7 over the overlapping pairs.
  const std::size_t lag = 7, n = r.size() - lag;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = r[i], y = r[i + lag];
    sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
  }
  const double pearson = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(s.at(lag) == doctest::Approx(pearson).epsilon(1e-3));
  CHECK(std::abs(s.at(lag)) < 4.0 / std::sqrt(r.size()));

  try {
    autocorrelation(Bits(100, 1), 5);
    FAIL("expected ZeroVariance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroVariance);
  }
  CHECK_THROWS(autocorrelation(Bits{0, 1}, 2));
}

TEST_CASE("MCV min-entropy") {
  const std::size_t n = 1000000;
  const double p = 0.5;
  const double pu = std::min(1.0, p + 2.576 * std::sqrt(p * (1 - p) / (n - 1)));
  CHECK(min_entropy_mcv(alternating(n), 1) == doctest::Approx(-std::log2(pu)).epsilon(1e-9));
  CHECK(min_entropy_mcv(alternating(n), 1) == doctest::Approx(0.996).epsilon(1e-3));
  CHECK(min_entropy_mcv(Bits(4000, 1), 2) == 0.0);
  try {
    min_entropy_mcv(Bits(1998, 1), 2);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("monobit and runs on the SP 800-22 worked example") {
  const Bits eps = hex_to_bits("C90FDAA22168C234C4C6628B8");
  REQUIRE(eps.size() == 100);
  CHECK(monobit_p(eps) == doctest::Approx(0.109599).epsilon(1e-5));
  CHECK(runs_p(eps) == doctest::Approx(0.500798).epsilon(1e-5));

  Bits comp = eps;
  for (auto& b : comp) b ^= 1u;
  CHECK(monobit_p(comp) == monobit_p(eps));

  CHECK(monobit_p(alternating(1000)) == 1.0);
  CHECK(monobit_p(Bits(1000, 1)) < 1e-10);
  CHECK_THROWS(runs_p(Bits(1000, 1)));
  CHECK_THROWS(monobit_p(Bits(99, 1)));
}

TEST_CASE("Fisher combination") {
  CHECK(fisher_combine(std::vector<double>{0.3}) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fisher_combine(std::vector<double>{1.0, 1.0, 1.0}) == doctest::Approx(1.0));
  const double x = -2.0 * 2 * std::log(0.1);
  const double closed = std::exp(-x / 2) * (1 + x / 2);
  CHECK(fisher_combine(std::vector<double>{0.1, 0.1}) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(closed == doctest::Approx(0.0561).epsilon(1e-3));
  CHECK(fisher_combine(std::vector<double>{0.05, 0.1}) <= fisher_combine(std::vector<double>{0.1, 0.1}));
  CHECK_THROWS(fisher_combine(std::vector<double>{0.0}));
  CHECK_THROWS(fisher_combine(std::vector<double>{}));
}

TEST_CASE("chi-square tail") {
  CHECK(chi_square_upper_tail(3.0, 1) == doctest::Approx(std::erfc(std::sqrt(1.5))).epsilon(1e-12));
  for (double x : {0.5, 4.0, 20.0}) {
    CHECK(chi_square_upper_tail(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
  }
  CHECK(chi_square_upper_tail(0.0, 255) == 1.0);
}
