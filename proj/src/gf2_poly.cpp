#include "qrng/gf2_poly.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#include "qrng/error.hpp"

namespace qrng {

Gf2Poly Gf2Poly::from_exponents(std::span<const unsigned> exponents) {
  Gf2Poly p;
  for (unsigned e : exponents) p.set(e, !p.coefficient(e));
  p.trim();
  return p;
}

Gf2Poly Gf2Poly::monomial(unsigned exponent) {
  Gf2Poly p;
  p.set(exponent, true);
  return p;
}

int Gf2Poly::degree() const {
  for (std::size_t w = words_.size(); w-- > 0;) {
    if (words_[w] != 0) {
      return static_cast<int>(w * 64 + 63 - static_cast<unsigned>(std::countl_zero(words_[w])));
    }
  }
  return -1;
}

bool Gf2Poly::coefficient(unsigned i) const {
  const std::size_t w = i / 64;
  return w < words_.size() && ((words_[w] >> (i % 64)) & 1u);
}

void Gf2Poly::set(unsigned i, bool value) {
  const std::size_t w = i / 64;
  if (w >= words_.size()) {
    if (!value) return;
    words_.resize(w + 1, 0);
  }
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  words_[w] = value ? (words_[w] | mask) : (words_[w] & ~mask);
  if (!value) trim();
}

Gf2Poly& Gf2Poly::operator^=(const Gf2Poly& other) {
  if (other.words_.size() > words_.size()) words_.resize(other.words_.size(), 0);
  for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] ^= other.words_[i];
  trim();
  return *this;
}

bool operator==(const Gf2Poly& a, const Gf2Poly& b) { return a.words_ == b.words_; }

void Gf2Poly::trim() {
  while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

Gf2Poly Gf2Poly::mod(const Gf2Poly& modulus) const {
  const int md = modulus.degree();
  if (md < 0) fail(ErrorKind::InvalidArgument, "Gf2Poly::mod: zero modulus");
  Gf2Poly r = *this;
  for (int d = r.degree(); d >= md; d = r.degree()) {
    const unsigned shift = static_cast<unsigned>(d - md);
    for (int i = 0; i <= md; ++i) {
      if (modulus.coefficient(static_cast<unsigned>(i))) {
        const unsigned k = static_cast<unsigned>(i) + shift;
        r.words_[k / 64] ^= std::uint64_t{1} << (k % 64);
      }
    }
    r.trim();
  }
  return r;
}

Gf2Poly gcd(Gf2Poly a, Gf2Poly b) {
  while (!b.is_zero()) {
    Gf2Poly r = a.mod(b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Gf2Ring::Gf2Ring(Gf2Poly modulus) : modulus_(std::move(modulus)), degree_(modulus_.degree()) {
  if (degree_ < 1) fail(ErrorKind::InvalidArgument, "Gf2Ring: modulus degree must be >= 1");
}

Gf2Poly Gf2Ring::mul(const Gf2Poly& a_in, const Gf2Poly& b_in) const {
  // Horner over b's bits, high to low: r = r*x (+ a), reduced each step.
  const Gf2Poly a = a_in.degree() >= degree_ ? a_in.mod(modulus_) : a_in;
  const Gf2Poly b = b_in.degree() >= degree_ ? b_in.mod(modulus_) : b_in;
  const unsigned d = static_cast<unsigned>(degree_);
  const std::size_t nwords = (d + 64) / 64;

  std::vector<std::uint64_t> r(nwords, 0), av(nwords, 0), mv(nwords, 0);
  for (unsigned i = 0; i < d; ++i) {
    if (a.coefficient(i)) av[i / 64] |= std::uint64_t{1} << (i % 64);
    if (modulus_.coefficient(i)) mv[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  const std::uint64_t top_mask = std::uint64_t{1} << (d % 64);
  const std::size_t top_word = d / 64;

  for (int i = b.degree(); i >= 0; --i) {
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < nwords; ++w) {
      const std::uint64_t next = r[w] >> 63;
      r[w] = (r[w] << 1) | carry;
      carry = next;
    }
    if (r[top_word] & top_mask) {
      r[top_word] ^= top_mask;
      for (std::size_t w = 0; w < nwords; ++w) r[w] ^= mv[w];
    }
    if (b.coefficient(static_cast<unsigned>(i))) {
      for (std::size_t w = 0; w < nwords; ++w) r[w] ^= av[w];
    }
  }

  Gf2Poly out;
  for (unsigned i = 0; i < d; ++i) {
    if ((r[i / 64] >> (i % 64)) & 1u) out.set(i, true);
  }
  return out;
}

Gf2Poly Gf2Ring::pow(Gf2Poly base, unsigned __int128 exponent) const {
  Gf2Poly result = Gf2Poly::monomial(0);
  base = base.mod(modulus_);
  while (exponent != 0) {
    if (exponent & 1u) result = mul(result, base);
    exponent >>= 1;
    if (exponent != 0) base = sqr(base);
  }
  return result;
}

Gf2Poly Gf2Ring::x_pow_2k(unsigned k) const {
  Gf2Poly p = Gf2Poly::monomial(1).mod(modulus_);
  for (unsigned i = 0; i < k; ++i) p = sqr(p);
  return p;
}

namespace {

Gf2Poly polynomial_from_taps(std::span<const unsigned> taps) {
  std::vector<unsigned> exps(taps.begin(), taps.end());
  exps.erase(std::remove(exps.begin(), exps.end(), 0u), exps.end());
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  if (exps.empty()) fail(ErrorKind::InvalidArgument, "polynomial taps are empty");
  exps.push_back(0);
  return Gf2Poly::from_exponents(exps);
}

std::vector<unsigned> prime_divisors(unsigned n) {
  std::vector<unsigned> out;
  for (unsigned p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_irreducible(std::span<const unsigned> taps) {
  const Gf2Poly m = polynomial_from_taps(taps);
  const unsigned d = static_cast<unsigned>(m.degree());
  const Gf2Ring ring(m);
  const Gf2Poly x = Gf2Poly::monomial(1).mod(m);
  if (!(ring.x_pow_2k(d) == x)) return false;
  for (unsigned p : prime_divisors(d)) {
    if (!gcd(m, ring.x_pow_2k(d / p) ^ x).is_one()) return false;
  }
  return true;
}

bool is_primitive(std::span<const unsigned> taps,
                  std::span<const PrimePower> order_factors) {
  const Gf2Poly m = polynomial_from_taps(taps);
  const unsigned d = static_cast<unsigned>(m.degree());
  const Gf2Ring ring(m);
  const Gf2Poly x = Gf2Poly::monomial(1).mod(m);
  const Gf2Poly one = Gf2Poly::monomial(0);

  // x^(2^d) = x, i.e. the order of x divides 2^d - 1.
  if (!(ring.x_pow_2k(d) == x)) return false;
  if (x == one) return false;

  for (std::size_t skip = 0; skip < order_factors.size(); ++skip) {
    Gf2Poly y = x;
    for (std::size_t i = 0; i < order_factors.size(); ++i) {
      const unsigned e = order_factors[i].exponent - (i == skip ? 1u : 0u);
      for (unsigned k = 0; k < e; ++k) y = ring.pow(y, order_factors[i].prime);
    }
    if (y == one) return false;
  }
  return true;
}

std::vector<PrimePower> factor_mersenne_by_trial_division(unsigned d) {
  if (d == 0 || d > 48) {
    fail(ErrorKind::InvalidArgument,
         "trial-division factorization supports 1 <= d <= 48, got " + std::to_string(d));
  }
  std::uint64_t n = (std::uint64_t{1} << d) - 1;
  std::vector<PrimePower> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.push_back({p, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

namespace {

constexpr unsigned __int128 u128(std::uint64_t hi, std::uint64_t lo) {
  return (static_cast<unsigned __int128>(hi) << 64) | lo;
}

// 2^476 - 1 = prod over d | 476 of the cyclotomic values Phi_d(2).
const std::array<PrimePower, 23> kMersenne476 = {{
    {3, 1},
    {5, 1},
    {29, 1},
    {43, 1},
    {113, 1},
    {127, 1},
    {137, 1},
    {239, 1},
    {953, 1},
    {2381, 1},
    {9521, 1},
    {20231, 1},
    {26317, 1},
    {42841, 1},
    {43691, 1},
    {131071, 1},
    {823481, 1},
    {823679683, 1},
    {62983048367ull, 1},
    {131105292137ull, 1},
    {536296539263941ull, 1},
    // 143162553165560959297
    {u128(7ull, 0xc2c78f98ab3c5141ull), 1},
    // 18292898984156916156396101
    {u128(991660ull, 0x0a7dee18ac06f245ull), 1},
}};

}  // namespace

std::span<const PrimePower> mersenne_476_factors() { return kMersenne476; }

}  // namespace qrng
