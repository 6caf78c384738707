#include "qrng/toeplitz.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "qrng/error.hpp"

namespace qrng {

namespace {

unsigned degree_of(std::span<const unsigned> taps) {
  if (taps.empty()) fail(ErrorKind::InvalidArgument, "polynomial taps are empty");
  return *std::max_element(taps.begin(), taps.end());
}

}  // namespace

void validate(const ToeplitzParams& params) {
  if (params.n_rows == 0 || params.n_cols == 0) {
    fail(ErrorKind::InvalidArgument, "toeplitz dimensions must be positive");
  }
  if (params.n_rows >= params.n_cols) {
    fail(ErrorKind::InvalidArgument, "toeplitz n_rows must be smaller than n_cols");
  }
  if (params.first_column.size() != params.n_rows) {
    fail(ErrorKind::InvalidArgument,
         "toeplitz first_column has " + std::to_string(params.first_column.size()) +
             " bits, expected " + std::to_string(params.n_rows));
  }
  if (degree_of(params.polynomial_taps) != params.n_rows) {
    fail(ErrorKind::InvalidArgument, "toeplitz polynomial degree must equal n_rows");
  }
  if (std::none_of(params.first_column.begin(), params.first_column.end(),
                   [](std::uint8_t b) { return b != 0; })) {
    fail(ErrorKind::InvalidSeed, "toeplitz first_column is all zero");
  }
}

Bits lfsr_generate_row(std::span<const std::uint8_t> first_column,
                       std::span<const unsigned> polynomial_taps, std::size_t n_cols) {
  const unsigned d = degree_of(polynomial_taps);
  if (first_column.size() != d) {
    fail(ErrorKind::InvalidArgument,
         "lfsr seed length " + std::to_string(first_column.size()) +
             " does not match polynomial degree " + std::to_string(d));
  }
  if (std::none_of(first_column.begin(), first_column.end(),
                   [](std::uint8_t b) { return b != 0; })) {
    fail(ErrorKind::InvalidSeed, "lfsr seed is all zero");
  }

  std::vector<unsigned> inner;
  for (unsigned t : polynomial_taps) {
    if (t != 0 && t != d) inner.push_back(t);
  }

  Bits seq(std::max<std::size_t>(n_cols, d));
  for (std::size_t i = 0; i < d; ++i) seq[i] = first_column[i] & 1u;
  for (std::size_t n = 0; n + d < seq.size(); ++n) {
    std::uint8_t fb = seq[n];
    for (unsigned t : inner) fb ^= seq[n + t];
    seq[n + d] = fb;
  }
  seq.resize(n_cols);
  return seq;
}

ToeplitzMatrix::ToeplitzMatrix(const ToeplitzParams& params) {
  validate(params);
  first_column_ = params.first_column;
  first_row_ = lfsr_generate_row(params.first_column, params.polynomial_taps, params.n_cols);
  pack_rows();
}

ToeplitzMatrix::ToeplitzMatrix(Bits first_column, Bits first_row)
    : first_column_(std::move(first_column)), first_row_(std::move(first_row)) {
  if (first_column_.empty() || first_row_.empty()) {
    fail(ErrorKind::InvalidArgument, "toeplitz diagonals must be non-empty");
  }
  if ((first_column_[0] & 1u) != (first_row_[0] & 1u)) {
    fail(ErrorKind::InvalidArgument, "toeplitz first_row[0] must equal first_column[0]");
  }
  pack_rows();
}

std::uint8_t ToeplitzMatrix::at(std::size_t i, std::size_t j) const {
  return j >= i ? first_row_[j - i] : first_column_[i - j];
}

void ToeplitzMatrix::pack_rows() {
  words_per_row_ = (cols() + 63) / 64;
  packed_.assign(rows() * words_per_row_, 0);
  for (std::size_t i = 0; i < rows(); ++i) {
    std::uint64_t* row = packed_.data() + i * words_per_row_;
    for (std::size_t j = 0; j < cols(); ++j) {
      if (at(i, j) & 1u) row[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
}

Bits ToeplitzMatrix::multiply(std::span<const std::uint8_t> x) const {
  if (x.size() != cols()) {
    fail(ErrorKind::InvalidArgument,
         "toeplitz multiply expects " + std::to_string(cols()) + " bits, got " +
             std::to_string(x.size()));
  }
  std::vector<std::uint64_t> xv(words_per_row_, 0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] & 1u) xv[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  Bits out(rows());
  for (std::size_t i = 0; i < rows(); ++i) {
    const std::uint64_t* row = packed_.data() + i * words_per_row_;
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_per_row_; ++w) acc ^= row[w] & xv[w];
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

Bits condition_stream(const ToeplitzMatrix& matrix, std::span<const std::uint8_t> raw) {
  const std::size_t blocks = raw.size() / matrix.cols();
  Bits out;
  out.reserve(blocks * matrix.rows());
  for (std::size_t b = 0; b < blocks; ++b) {
    const Bits y = matrix.multiply(raw.subspan(b * matrix.cols(), matrix.cols()));
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

}  // namespace qrng
