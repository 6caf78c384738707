#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qrng/bits.hpp"

namespace qrng {

/// x^476 + x^15 + 1, primitive over GF(2).
inline const std::vector<unsigned> kDefaultToeplitzTaps = {476, 15};

struct ToeplitzParams {
  std::size_t n_rows = 476;
  std::size_t n_cols = 600;
  /// Length n_rows; also the LFSR seed.
  Bits first_column;
  /// Nonzero exponents of the feedback polynomial; the constant term is
  /// implied and the largest tap is the degree.
  std::vector<unsigned> polynomial_taps = kDefaultToeplitzTaps;
};

/// Throws InvalidArgument / InvalidSeed on the first violated invariant.
void validate(const ToeplitzParams& params);

/// Fibonacci LFSR over the recurrence a[n+d] = a[n] ^ XOR_{t in taps, t<d} a[n+t],
/// seeded with a[0..d) = first_column. Returns a[0..n_cols), so the first
/// d outputs are the seed itself, oldest bit first.
Bits lfsr_generate_row(std::span<const std::uint8_t> first_column,
                       std::span<const unsigned> polynomial_taps, std::size_t n_cols);

/// Binary Toeplitz matrix stored as its first column and first row, with
/// word-packed copies of every row for the multiply.
class ToeplitzMatrix {
 public:
  /// Generates the first row from the params' LFSR.
  explicit ToeplitzMatrix(const ToeplitzParams& params);

  /// Explicit diagonals. first_row[0] must equal first_column[0].
  ToeplitzMatrix(Bits first_column, Bits first_row);

  std::size_t rows() const { return first_column_.size(); }
  std::size_t cols() const { return first_row_.size(); }
  const Bits& first_column() const { return first_column_; }
  const Bits& first_row() const { return first_row_; }

  /// M[i][j], taken from the first row when j >= i and the first column otherwise.
  std::uint8_t at(std::size_t i, std::size_t j) const;

  /// M * x over GF(2). Throws InvalidArgument unless x has cols() bits.
  Bits multiply(std::span<const std::uint8_t> x) const;

 private:
  void pack_rows();

  Bits first_column_;
  Bits first_row_;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> packed_;
};

/// Conditions one raw block: M * block.
inline Bits condition(const ToeplitzMatrix& matrix, std::span<const std::uint8_t> block) {
  return matrix.multiply(block);
}

/// Conditions every complete n_cols block of `raw` and concatenates the outputs.
Bits condition_stream(const ToeplitzMatrix& matrix, std::span<const std::uint8_t> raw);

}  // namespace qrng
