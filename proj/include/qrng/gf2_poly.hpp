#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qrng {

/// Polynomial over GF(2), coefficient i stored at bit i of the word array.
class Gf2Poly {
 public:
  Gf2Poly() = default;

  /// x^e1 + x^e2 + ... for the listed exponents (duplicates cancel).
  static Gf2Poly from_exponents(std::span<const unsigned> exponents);
  static Gf2Poly monomial(unsigned exponent);

  /// -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return degree() < 0; }
  bool is_one() const { return degree() == 0; }
  bool coefficient(unsigned i) const;
  void set(unsigned i, bool value);

  Gf2Poly& operator^=(const Gf2Poly& other);
  friend Gf2Poly operator^(Gf2Poly a, const Gf2Poly& b) { return a ^= b; }
  friend bool operator==(const Gf2Poly& a, const Gf2Poly& b);

  /// Remainder modulo a nonzero polynomial.
  Gf2Poly mod(const Gf2Poly& modulus) const;

 private:
  void trim();
  std::vector<std::uint64_t> words_;
};

Gf2Poly gcd(Gf2Poly a, Gf2Poly b);

/// Arithmetic in GF(2)[x] / (m) for a fixed modulus of degree >= 1.
class Gf2Ring {
 public:
  explicit Gf2Ring(Gf2Poly modulus);

  Gf2Poly mul(const Gf2Poly& a, const Gf2Poly& b) const;
  Gf2Poly sqr(const Gf2Poly& a) const { return mul(a, a); }
  Gf2Poly pow(Gf2Poly base, unsigned __int128 exponent) const;
  /// x^(2^k) mod m by k squarings.
  Gf2Poly x_pow_2k(unsigned k) const;

  const Gf2Poly& modulus() const { return modulus_; }

 private:
  Gf2Poly modulus_;
  int degree_;
};

struct PrimePower {
  unsigned __int128 prime;
  unsigned exponent;
};

/// Rabin's test. Taps are the nonzero exponents above the constant term
/// (the constant term is always present), e.g. {4, 1} for x^4 + x + 1.
bool is_irreducible(std::span<const unsigned> taps);

/// Order test: x^(2^d - 1) = 1 and x^((2^d - 1)/r) != 1 for each prime r.
/// `order_factors` must be the full factorization of 2^d - 1.
bool is_primitive(std::span<const unsigned> taps,
                  std::span<const PrimePower> order_factors);

/// Factorization of 2^d - 1 by trial division, for d <= 48.
std::vector<PrimePower> factor_mersenne_by_trial_division(unsigned d);

/// Prime factorization of 2^476 - 1 (all exponents are 1).
std::span<const PrimePower> mersenne_476_factors();

}  // namespace qrng
