#include "qrng/formats.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "qrng/error.hpp"

namespace qrng {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (std::size_t i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void read(void* dst, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n) {
      throw FormatError(std::string("truncated input while reading ") + what, offset_ + got);
    }
    offset_ += n;
  }

  std::uint64_t u64(const char* what) {
    std::array<unsigned char, 8> b{};
    read(b.data(), b.size(), what);
    std::uint64_t v = 0;
    for (std::size_t i = 8; i-- > 0;) v = (v << 8) | b[i];
    return v;
  }

  void magic(const char (&expected)[5]) {
    std::array<char, 4> m{};
    read(m.data(), m.size(), "magic");
    if (std::memcmp(m.data(), expected, 4) != 0) {
      throw FormatError(std::string("bad magic, expected ") + expected, 0);
    }
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw FormatError("trailing data after payload", offset_);
    }
  }

  std::uint64_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::uint64_t offset, const char* what) {
  T v{};
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw FormatError(std::string("invalid ") + what + " '" + std::string(text) + "'", offset);
  }
  return v;
}

}  // namespace

void write_tick_stream(std::ostream& out, const TickStream& stream) {
  out.write("QTIK", 4);
  put_u64(out, std::bit_cast<std::uint64_t>(stream.resolution_s));
  put_u64(out, stream.ticks.size());
  for (std::uint64_t t : stream.ticks) put_u64(out, t);
}

TickStream read_tick_stream(std::istream& in) {
  Reader r(in);
  r.magic("QTIK");
  TickStream s;
  s.resolution_s = std::bit_cast<double>(r.u64("resolution"));
  if (!(s.resolution_s > 0.0)) throw FormatError("non-positive tick resolution", 4);
  const std::uint64_t count = r.u64("count");
  s.ticks.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t at = r.offset();
    const std::uint64_t t = r.u64("tick");
    if (!s.ticks.empty()) {
      if (t < s.ticks.back()) throw FormatError("ticks are not non-decreasing", at);
      if (t == s.ticks.back()) ++s.duplicate_ticks;
    }
    s.ticks.push_back(t);
  }
  r.expect_end();
  return s;
}

void write_tick_stream_text(std::ostream& out, const TickStream& stream) {
  for (std::uint64_t t : stream.ticks) out << t << '\n';
}

TickStream read_tick_stream_text(std::istream& in, double resolution_s) {
  TickStream s;
  s.resolution_s = resolution_s;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (!text.empty()) {
      const auto t = parse_number<std::uint64_t>(text, offset, "tick");
      if (!s.ticks.empty()) {
        if (t < s.ticks.back()) throw FormatError("ticks are not non-decreasing", offset);
        if (t == s.ticks.back()) ++s.duplicate_ticks;
      }
      s.ticks.push_back(t);
    }
    offset += line.size() + 1;
  }
  return s;
}

void write_packed_bits(std::ostream& out, std::span<const std::uint8_t> bits) {
  out.write("QBIT", 4);
  put_u64(out, bits.size());
  const Bytes packed = pack_bits(bits);
  out.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
}

Bits read_packed_bits(std::istream& in) {
  Reader r(in);
  r.magic("QBIT");
  const std::uint64_t bit_count = r.u64("bit count");
  Bytes packed(static_cast<std::size_t>((bit_count + 7) / 8));
  r.read(packed.data(), packed.size(), "payload");
  if (bit_count % 8 != 0) {
    const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xffu >> (bit_count % 8));
    if (packed.back() & pad_mask) {
      throw FormatError("nonzero padding bits in final byte", r.offset() - 1);
    }
  }
  r.expect_end();
  return unpack_bits(packed, static_cast<std::size_t>(bit_count));
}

void write_toeplitz_params(std::ostream& out, const ToeplitzParams& params) {
  out << "n_rows=" << params.n_rows << '\n' << "n_cols=" << params.n_cols << '\n' << "taps=";
  for (std::size_t i = 0; i < params.polynomial_taps.size(); ++i) {
    out << (i ? " " : "") << params.polynomial_taps[i];
  }
  Bits padded = params.first_column;
  padded.resize((padded.size() + 3) / 4 * 4, 0);
  out << '\n' << "first_column=" << bits_to_hex(padded) << '\n';
}

ToeplitzParams read_toeplitz_params(std::istream& in) {
  ToeplitzParams p;
  p.polynomial_taps.clear();
  std::string first_column_hex;
  bool have_rows = false, have_cols = false, have_taps = false, have_column = false;
  std::uint64_t first_column_offset = 0;

  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const auto text = trim(line);
    if (!text.empty() && text.front() != '#') {
      const auto eq = text.find('=');
      if (eq == std::string_view::npos) throw FormatError("expected key=value", offset);
      const auto key = trim(text.substr(0, eq));
      const auto value = trim(text.substr(eq + 1));
      if (key == "n_rows") {
        p.n_rows = parse_number<std::size_t>(value, offset, "n_rows");
        have_rows = true;
      } else if (key == "n_cols") {
        p.n_cols = parse_number<std::size_t>(value, offset, "n_cols");
        have_cols = true;
      } else if (key == "taps") {
        std::string list(value);
        std::replace(list.begin(), list.end(), ',', ' ');
        std::istringstream ss(list);
        std::string tok;
        while (ss >> tok) p.polynomial_taps.push_back(parse_number<unsigned>(tok, offset, "tap"));
        have_taps = !p.polynomial_taps.empty();
      } else if (key == "first_column") {
        first_column_hex = std::string(value);
        first_column_offset = offset;
        have_column = true;
      } else {
        throw FormatError("unknown key '" + std::string(key) + "'", offset);
      }
    }
    offset += line.size() + 1;
  }
  if (!have_rows || !have_cols || !have_taps || !have_column) {
    throw FormatError("params file must define n_rows, n_cols, taps and first_column", offset);
  }
  Bits column;
  try {
    column = hex_to_bits(first_column_hex);
  } catch (const FormatError& e) {
    throw FormatError("invalid first_column hex", first_column_offset + e.offset());
  }
  if (column.size() < p.n_rows || column.size() >= p.n_rows + 4) {
    throw FormatError("first_column hex length does not match n_rows", first_column_offset);
  }
  if (std::any_of(column.begin() + static_cast<std::ptrdiff_t>(p.n_rows), column.end(),
                  [](std::uint8_t b) { return b != 0; })) {
    throw FormatError("first_column padding bits must be zero", first_column_offset);
  }
  column.resize(p.n_rows);
  p.first_column = std::move(column);
  return p;
}

void export_bits_ascii(std::ostream& out, std::span<const std::uint8_t> bits) {
  std::string line;
  line.reserve(bits.size());
  for (std::uint8_t b : bits) line.push_back((b & 1u) ? '1' : '0');
  out << line;
}

void export_bits_binary(std::ostream& out, std::span<const std::uint8_t> bits) {
  const Bytes packed = pack_bits(bits);
  out.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

}  // namespace

TickStream load_tick_stream(const std::filesystem::path& path) {
  auto in = open_in(path);
  return with_path(path, [&] { return read_tick_stream(in); });
}

void save_tick_stream(const std::filesystem::path& path, const TickStream& stream) {
  auto out = open_out(path);
  write_tick_stream(out, stream);
  if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

Bits load_packed_bits(const std::filesystem::path& path) {
  auto in = open_in(path);
  return with_path(path, [&] { return read_packed_bits(in); });
}

void save_packed_bits(const std::filesystem::path& path, std::span<const std::uint8_t> bits) {
  auto out = open_out(path);
  write_packed_bits(out, bits);
  if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

ToeplitzParams load_toeplitz_params(const std::filesystem::path& path) {
  auto in = open_in(path);
  return with_path(path, [&] { return read_toeplitz_params(in); });
}

}  // namespace qrng
