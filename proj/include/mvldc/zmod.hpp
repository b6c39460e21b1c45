#pragma once

// Arithmetic over Z_m for odd composite m: factorization bookkeeping, CRT,
// canonical sets and inner products of vectors in Z_m^h.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvldc/error.hpp"

namespace mvldc::zmod {

using Residue = std::uint32_t;

/// Moduli are capped so residues fit in 32 bits and |S_m| = 2^r - 1 stays small.
inline constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 32) - 1;
inline constexpr std::size_t kMaxPrimeFactors = 4;

struct PrimePower {
  std::uint32_t prime;
  std::uint32_t exponent;
  std::uint32_t value;  // prime^exponent

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class Modulus {
 public:
  Modulus() = default;

  std::uint32_t value() const noexcept { return m_; }
  std::span<const PrimePower> factors() const noexcept { return factors_; }
  /// Number of distinct primes.
  std::size_t r() const noexcept { return factors_.size(); }

  friend bool operator==(const Modulus& a, const Modulus& b) { return a.m_ == b.m_; }

 private:
  friend Modulus factorize(std::uint64_t m);

  std::uint32_t m_ = 0;
  std::vector<PrimePower> factors_;
};

/// Trial division. Rejects even m, m < 3, m >= 2^32 and more than four primes.
inline Modulus factorize(std::uint64_t m) {
  require(m >= 3, "modulus must be >= 3, got " + std::to_string(m));
  require(m % 2 == 1, "modulus must be odd, got " + std::to_string(m));
  if (m > kMaxModulus) {
    fail(ErrorKind::kLimitExceeded, "modulus " + std::to_string(m) + " exceeds 2^32 - 1");
  }
  Modulus out;
  out.m_ = static_cast<std::uint32_t>(m);
  std::uint64_t rest = m;
  for (std::uint64_t p = 3; p * p <= rest; p += 2) {
    if (rest % p != 0) continue;
    PrimePower pp{static_cast<std::uint32_t>(p), 0, 1};
    while (rest % p == 0) {
      rest /= p;
      ++pp.exponent;
      pp.value *= static_cast<std::uint32_t>(p);
    }
    out.factors_.push_back(pp);
  }
  if (rest > 1) {
    out.factors_.push_back({static_cast<std::uint32_t>(rest), 1,
                            static_cast<std::uint32_t>(rest)});
  }
  if (out.factors_.size() > kMaxPrimeFactors) {
    fail(ErrorKind::kLimitExceeded, "modulus " + std::to_string(m) + " has " +
                                        std::to_string(out.factors_.size()) +
                                        " prime factors; at most 4 supported");
  }
  return out;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Inverse of a modulo m; a must be a unit.
inline std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
  std::int64_t old_r = static_cast<std::int64_t>(a % m), r = static_cast<std::int64_t>(m);
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    std::int64_t q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
  }
  require(old_r == 1, "element " + std::to_string(a) + " is not a unit mod " + std::to_string(m));
  std::int64_t mm = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(((old_s % mm) + mm) % mm);
}

struct Congruence {
  std::uint64_t residue;
  std::uint64_t modulus;
};

/// Unique x in [0, prod moduli) with x = residue_i (mod modulus_i). The
/// product must stay below 2^63.
inline std::uint64_t crt_solve(std::span<const Congruence> system) {
  std::uint64_t x = 0;
  std::uint64_t mod = 1;
  for (const Congruence& c : system) {
    require(c.modulus >= 1, "CRT modulus must be positive");
    require(std::gcd(mod, c.modulus) == 1,
            "CRT moduli not pairwise coprime (" + std::to_string(c.modulus) + ")");
    require(mod <= (std::uint64_t{1} << 63) / c.modulus, "CRT modulus product overflows");
    // x' = x + mod * ((r - x) * mod^{-1} mod c.modulus)
    std::uint64_t r = c.residue % c.modulus;
    std::uint64_t diff = (r + c.modulus - x % c.modulus) % c.modulus;
    std::uint64_t step =
        c.modulus == 1 ? 0 : mulmod(diff, invmod(mod % c.modulus, c.modulus), c.modulus);
    x += mod * step;
    mod *= c.modulus;
  }
  return x;
}

/// s is in S_m or zero: s = 0 or 1 modulo every prime-power factor.
inline bool is_zero_one_pattern(const Modulus& mod, std::uint64_t s) {
  for (const PrimePower& pp : mod.factors()) {
    std::uint64_t v = s % pp.value;
    if (v != 0 && v != 1) return false;
  }
  return true;
}

inline bool in_canonical_set(const Modulus& mod, std::uint64_t s) {
  s %= mod.value();
  return s != 0 && is_zero_one_pattern(mod, s);
}

/// S_m, stored in binary-representation order: element t-1 is s_t, where
/// s_t = bit (i-1) of t modulo the i-th prime power (primes ascending).
class CanonicalSet {
 public:
  const Modulus& modulus() const noexcept { return mod_; }
  std::span<const Residue> elements() const& noexcept { return elements_; }
  std::span<const Residue> elements() const&& = delete;
  std::size_t size() const noexcept { return elements_.size(); }

  std::vector<Residue> sorted() const {
    std::vector<Residue> out = elements_;
    std::sort(out.begin(), out.end());
    return out;
  }

  bool contains(std::uint64_t s) const { return in_canonical_set(mod_, s); }

 private:
  friend CanonicalSet canonical_set(const Modulus& mod);

  Modulus mod_;
  std::vector<Residue> elements_;
};

inline CanonicalSet canonical_set(const Modulus& mod) {
  CanonicalSet out;
  out.mod_ = mod;
  const std::size_t r = mod.r();
  std::vector<Congruence> system(r);
  for (std::uint64_t t = 1; t < (std::uint64_t{1} << r); ++t) {
    for (std::size_t i = 0; i < r; ++i) {
      system[i] = {(t >> i) & 1, mod.factors()[i].value};
    }
    out.elements_.push_back(static_cast<Residue>(crt_solve(system)));
  }
  return out;
}

/// Element of Z_m^h. Coordinates are fully reduced on construction.
class ZVector {
 public:
  ZVector() = default;

  ZVector(std::uint32_t m, std::vector<Residue> coords) : m_(m), coords_(std::move(coords)) {
    require(m_ >= 1, "ZVector modulus must be positive");
    for (Residue& c : coords_) c %= m_;
  }

  static ZVector from_signed(std::uint32_t m, std::span<const std::int64_t> coords) {
    std::vector<Residue> reduced(coords.size());
    const std::int64_t mm = m;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      reduced[j] = static_cast<Residue>(((coords[j] % mm) + mm) % mm);
    }
    return ZVector(m, std::move(reduced));
  }

  static ZVector zero(std::uint32_t m, std::size_t h) {
    return ZVector(m, std::vector<Residue>(h, 0));
  }

  std::uint32_t modulus() const noexcept { return m_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const Residue> coords() const noexcept { return coords_; }
  Residue operator[](std::size_t j) const { return coords_[j]; }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](Residue c) { return c == 0; });
  }

  /// this + c * other
  ZVector axpy(std::uint64_t c, const ZVector& other) const {
    require(m_ == other.m_ && dim() == other.dim(), "ZVector shape mismatch");
    std::vector<Residue> out(coords_.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = static_cast<Residue>((coords_[j] + mulmod(c % m_, other.coords_[j], m_)) % m_);
    }
    return ZVector(m_, std::move(out));
  }

  friend bool operator==(const ZVector&, const ZVector&) = default;
  friend auto operator<=>(const ZVector& a, const ZVector& b) {
    return a.coords_ <=> b.coords_;
  }

 private:
  std::uint32_t m_ = 1;
  std::vector<Residue> coords_;
};

inline Residue inner_product(std::span<const Residue> x, std::span<const Residue> y,
                             std::uint32_t m) {
  std::uint64_t acc = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    acc = (acc + std::uint64_t{x[j]} * y[j]) % m;
  }
  return static_cast<Residue>(acc);
}

inline Residue inner_product(const ZVector& x, const ZVector& y) {
  require(x.modulus() == y.modulus(), "inner_product: modulus mismatch");
  require(x.dim() == y.dim(), "inner_product: dimension mismatch");
  return inner_product(x.coords(), y.coords(), x.modulus());
}

/// Decomposes s in S_m u {0}, m = m1*m2 coprime, into (s mod m1, s mod m2).
inline std::pair<Residue, Residue> split_canonical(std::uint64_t s, const Modulus& m1,
                                                   const Modulus& m2) {
  require(std::gcd(m1.value(), m2.value()) == 1, "split_canonical: moduli not coprime");
  const std::uint64_t m = std::uint64_t{m1.value()} * m2.value();
  require(m <= kMaxModulus, "split_canonical: product modulus too large");
  require(s < m, "split_canonical: residue out of range");
  if (!is_zero_one_pattern(m1, s) || !is_zero_one_pattern(m2, s)) {
    fail(ErrorKind::kInvalidArgument,
         std::to_string(s) + " is not in S_" + std::to_string(m) + " u {0}");
  }
  return {static_cast<Residue>(s % m1.value()), static_cast<Residue>(s % m2.value())};
}

}  // namespace mvldc::zmod
