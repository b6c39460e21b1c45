#pragma once

// GF(2^t) arithmetic for 1 <= t <= 40 in the polynomial basis, plus the
// order-m element machinery used to build and compose matching-vector codes.
//
// Polynomials over F_2 are packed bit-vectors: bit i is the coefficient of
// x^i. Field elements use the same packing, reduced modulo the field's
// modulus polynomial.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvldc/error.hpp"
#include "mvldc/zmod.hpp"

namespace mvldc::gf2 {

using Poly = std::uint64_t;

inline constexpr unsigned kMaxDegree = 40;
inline constexpr unsigned kMaxTableDegree = 20;

/// -1 for the zero polynomial.
inline int degree(Poly p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

inline Poly poly_mod(Poly a, Poly f) {
  const int d = degree(f);
  require(d >= 0, "poly_mod: zero modulus");
  for (int i = degree(a); i >= d; --i) {
    if ((a >> i) & 1) a ^= f << (i - d);
  }
  return a;
}

/// a*b mod f, for a, b already reduced modulo f (deg f <= 62).
inline Poly poly_mulmod(Poly a, Poly b, Poly f) {
  const int d = degree(f);
  Poly r = 0;
  for (int i = d - 1; i >= 0; --i) {
    r <<= 1;
    if ((r >> d) & 1) r ^= f;
    if ((b >> i) & 1) r ^= a;
  }
  return r;
}

inline Poly poly_gcd(Poly a, Poly b) {
  while (b != 0) {
    a = poly_mod(a, b);
    std::swap(a, b);
  }
  return a;
}

/// Distinct primes of n by trial division. Exact for n < 2^40 with the
/// default bound since every composite then has a factor below 2^20.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// Rabin's test.
inline bool is_irreducible(Poly f) {
  const int d = degree(f);
  if (d < 1) return false;
  if (d == 1) return true;
  if ((f & 1) == 0) return false;
  auto frobenius_power = [f](unsigned k) {
    Poly x = 2;
    for (unsigned i = 0; i < k; ++i) x = poly_mulmod(x, x, f);
    return x;
  };
  if (frobenius_power(static_cast<unsigned>(d)) != 2) return false;
  for (std::uint64_t q : prime_factors(static_cast<std::uint64_t>(d))) {
    Poly g = poly_gcd(f, frobenius_power(static_cast<unsigned>(d / q)) ^ 2);
    if (g != 1) return false;
  }
  return true;
}

/// x^4+x+1 and x^9+x^4+1 for t = 4, 9; otherwise the irreducible of degree
/// t with the smallest integer encoding.
inline Poly default_modulus(unsigned t) {
  require(t >= 1 && t <= kMaxDegree, "field degree must be in [1, 40], got " + std::to_string(t));
  if (t == 4) return 0x13;
  if (t == 9) return 0x211;
  for (Poly f = Poly{1} << t;; ++f) {
    if (is_irreducible(f)) return f;
  }
}

inline std::string to_hex(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(kDigits[v & 0xf]);
    v >>= 4;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

inline std::uint64_t parse_hex(std::string_view s) {
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  require(!s.empty() && s.size() <= 16, "malformed hex value '" + std::string(s) + "'");
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else fail(ErrorKind::kInvalidArgument, "malformed hex value '" + std::string(s) + "'");
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

/// Least t >= 1 with 2^t = 1 (mod m), computed from the Carmichael function.
inline std::uint32_t mult_order_of_2(const zmod::Modulus& mod) {
  std::uint64_t lambda = 1;
  for (const zmod::PrimePower& pp : mod.factors()) {
    const std::uint64_t phi = pp.value / pp.prime * (pp.prime - 1);
    lambda = std::lcm(lambda, phi);
  }
  std::uint64_t order = lambda;
  for (std::uint64_t q : prime_factors(lambda)) {
    while (order % q == 0 && zmod::powmod(2, order / q, mod.value()) == 1) order /= q;
  }
  return static_cast<std::uint32_t>(order);
}

struct Elem {
  std::uint64_t bits = 0;

  friend bool operator==(Elem, Elem) = default;
  friend auto operator<=>(Elem, Elem) = default;
};

class Field {
 public:
  /// GF(2^t) modulo `modulus` (verified irreducible) or default_modulus(t).
  explicit Field(unsigned t, std::optional<Poly> modulus = std::nullopt)
      : t_(t), poly_(modulus.value_or(0)) {
    require(t >= 1 && t <= kMaxDegree, "field degree must be in [1, 40], got " + std::to_string(t));
    if (modulus) {
      require(gf2::degree(*modulus) == static_cast<int>(t),
              "modulus polynomial 0x" + to_hex(*modulus) + " does not have degree " +
                  std::to_string(t));
      require(is_irreducible(*modulus),
              "modulus polynomial 0x" + to_hex(*modulus) + " is reducible");
    } else {
      poly_ = default_modulus(t);
    }
    group_order_ = (std::uint64_t{1} << t) - 1;
    group_primes_ = prime_factors(group_order_);
    for (std::uint64_t c = 1; c <= group_order_; ++c) {
      if (element_order(Elem{c}) == group_order_) {
        generator_ = Elem{c};
        break;
      }
    }
    if (t <= kMaxTableDegree) build_tables();
  }

  /// Field whose modulus is `poly`; degree is inferred.
  static Field from_modulus(Poly poly) {
    require(gf2::degree(poly) >= 1, "modulus polynomial must have degree >= 1");
    return Field(static_cast<unsigned>(gf2::degree(poly)), poly);
  }

  unsigned degree() const noexcept { return t_; }
  Poly modulus() const noexcept { return poly_; }
  /// 2^t - 1.
  std::uint64_t group_order() const noexcept { return group_order_; }
  std::span<const std::uint64_t> group_order_primes() const noexcept { return group_primes_; }
  Elem generator() const noexcept { return generator_; }
  std::uint64_t size() const noexcept { return group_order_ + 1; }

  Elem zero() const noexcept { return Elem{0}; }
  Elem one() const noexcept { return Elem{1}; }
  /// The polynomial-basis element x.
  Elem x() const { return Elem{poly_mod(2, poly_)}; }

  bool contains(Elem a) const noexcept { return a.bits <= group_order_; }
  void check(Elem a) const {
    if (!contains(a)) {
      fail(ErrorKind::kInvalidArgument,
           "element 0x" + to_hex(a.bits) + " is not in GF(2^" + std::to_string(t_) + ")");
    }
  }

  bool same_as(const Field& other) const noexcept {
    return t_ == other.t_ && poly_ == other.poly_;
  }

  Elem add(Elem a, Elem b) const noexcept { return Elem{a.bits ^ b.bits}; }

  Elem mul(Elem a, Elem b) const noexcept {
    if (tables_) {
      if (a.bits == 0 || b.bits == 0) return Elem{0};
      const Tables& tb = *tables_;
      return Elem{tb.exp[tb.log[a.bits] + tb.log[b.bits]]};
    }
    return Elem{poly_mulmod(a.bits, b.bits, poly_)};
  }

  Elem sqr(Elem a) const noexcept { return mul(a, a); }

  Elem pow(Elem a, std::uint64_t e) const noexcept {
    if (e == 0) return one();
    if (a.bits == 0) return zero();
    if (tables_) {
      const Tables& tb = *tables_;
      const std::uint64_t l = zmod::mulmod(tb.log[a.bits], e % group_order_, group_order_);
      return Elem{tb.exp[l]};
    }
    Elem result = one();
    while (e != 0) {
      if (e & 1) result = mul(result, a);
      a = mul(a, a);
      e >>= 1;
    }
    return result;
  }

  Elem inv(Elem a) const {
    if (a.bits == 0) fail(ErrorKind::kInvalidArgument, "inverse of zero");
    return pow(a, group_order_ - 1);
  }

  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  /// Exact multiplicative order from the factorization of 2^t - 1.
  std::uint64_t element_order(Elem a) const {
    if (a.bits == 0) fail(ErrorKind::kInvalidArgument, "order of zero is undefined");
    std::uint64_t n = group_order_;
    for (std::uint64_t p : group_primes_) {
      while (n % p == 0 && pow(a, n / p) == one()) n /= p;
    }
    return n;
  }

  /// f(a) for f in F_2[x].
  Elem eval(Poly f, Elem a) const noexcept {
    Elem acc = zero();
    for (int i = gf2::degree(f); i >= 0; --i) {
      acc = mul(acc, a);
      if ((f >> i) & 1) acc.bits ^= 1;
    }
    return acc;
  }

  /// Minimal polynomial of a over F_2: prod over Frobenius conjugates.
  Poly minimal_polynomial(Elem a) const {
    std::vector<Elem> conj{a};
    for (Elem c = sqr(a); c != a; c = sqr(c)) conj.push_back(c);
    // Coefficients low-to-high of prod (X + c).
    std::vector<Elem> coeffs{one()};
    for (Elem c : conj) {
      std::vector<Elem> next(coeffs.size() + 1, zero());
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        next[i + 1] = add(next[i + 1], coeffs[i]);
        next[i] = add(next[i], mul(coeffs[i], c));
      }
      coeffs = std::move(next);
    }
    Poly out = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i].bits > 1) fail(ErrorKind::kInternal, "minimal polynomial not over F_2");
      out |= coeffs[i].bits << i;
    }
    return out;
  }

 private:
  struct Tables {
    std::vector<std::uint32_t> log;
    std::vector<std::uint32_t> exp;  // doubled so exp[log a + log b] needs no reduction
  };

  void build_tables() {
    auto tb = std::make_shared<Tables>();
    const std::size_t n = static_cast<std::size_t>(group_order_);
    tb->log.assign(n + 1, 0);
    tb->exp.assign(2 * n + 1, 0);
    Poly v = 1;
    for (std::size_t i = 0; i < n; ++i) {
      tb->exp[i] = static_cast<std::uint32_t>(v);
      tb->exp[i + n] = static_cast<std::uint32_t>(v);
      tb->log[v] = static_cast<std::uint32_t>(i);
      v = poly_mulmod(v, generator_.bits, poly_);
    }
    tb->exp[2 * n] = tb->exp[0];
    tables_ = std::move(tb);
  }

  unsigned t_;
  Poly poly_;
  std::uint64_t group_order_ = 0;
  std::vector<std::uint64_t> group_primes_;
  Elem generator_{1};
  std::shared_ptr<const Tables> tables_;
};

/// A field element together with its verified multiplicative order m.
struct OrderMElement {
  Elem element;
  std::uint32_t m = 0;
};

inline OrderMElement as_order_m(const Field& field, Elem a, std::uint64_t m) {
  field.check(a);
  const std::uint64_t ord = field.element_order(a);
  if (ord != m) {
    fail(ErrorKind::kContractViolation, "element 0x" + to_hex(a.bits) + " has order " +
                                            std::to_string(ord) + ", expected " +
                                            std::to_string(m));
  }
  return OrderMElement{a, static_cast<std::uint32_t>(m)};
}

/// g^((2^t - 1) / m) for the field's cached generator g.
inline OrderMElement find_order_m_element(const Field& field, std::uint64_t m) {
  require(m >= 1, "order must be positive");
  if (field.group_order() % m != 0) {
    fail(ErrorKind::kInvalidArgument, std::to_string(m) + " does not divide 2^" +
                                          std::to_string(field.degree()) + " - 1");
  }
  return as_order_m(field, field.pow(field.generator(), field.group_order() / m), m);
}

/// h1 in Z*_{m1} with gamma^(h1 * m2) = target, where m = m1 * m2 is the
/// order of gamma and target has order m1.
inline std::uint32_t find_twist_exponent(const Field& field, const OrderMElement& gamma,
                                         std::uint32_t m1, const OrderMElement& target) {
  require(m1 >= 2 && gamma.m % m1 == 0,
          std::to_string(m1) + " does not divide " + std::to_string(gamma.m));
  const std::uint32_t m2 = gamma.m / m1;
  require(std::gcd(m1, m2) == 1, "twist exponent needs coprime cofactors");
  if (field.element_order(target.element) != m1) {
    fail(ErrorKind::kContractViolation, "twist target does not have order " + std::to_string(m1));
  }
  const Elem step = field.pow(gamma.element, m2);
  Elem cur = step;
  for (std::uint32_t h = 1; h < m1; ++h, cur = field.mul(cur, step)) {
    if (std::gcd(h, m1) == 1 && cur == target.element) return h;
  }
  fail(ErrorKind::kInternal, "no twist exponent found");
}

/// A root in `big` of the irreducible `minpoly` whose degree divides the
/// field degree. Among the Frobenius conjugates the smallest encoding wins.
inline Elem find_subfield_copy(const Field& big, Poly minpoly) {
  const int d = degree(minpoly);
  require(d >= 1, "minimal polynomial must have degree >= 1");
  require(big.degree() % static_cast<unsigned>(d) == 0,
          "degree " + std::to_string(d) + " does not divide field degree " +
              std::to_string(big.degree()));
  require(is_irreducible(minpoly), "polynomial 0x" + to_hex(minpoly) + " is reducible");
  // Every root has the order of x in F_2[x]/(minpoly).
  const Field small = Field::from_modulus(minpoly);
  const std::uint64_t ord = small.element_order(small.x());
  const Elem alpha = big.pow(big.generator(), big.group_order() / ord);
  if (ord == 1) return big.one();
  Elem beta = alpha;
  for (std::uint64_t j = 1; j < ord; ++j, beta = big.mul(beta, alpha)) {
    if (std::gcd(j, ord) != 1) continue;
    if (big.eval(minpoly, beta) != big.zero()) continue;
    Elem best = beta;
    for (Elem c = big.sqr(beta); c != beta; c = big.sqr(c)) best = std::min(best, c);
    return best;
  }
  fail(ErrorKind::kInternal, "no root of 0x" + to_hex(minpoly) + " found");
}

/// Coordinates relative to the basis 1, gamma, ..., gamma^(d-1) of F_2(gamma),
/// where d is the degree of gamma's minimal polynomial.
class GammaBasis {
 public:
  GammaBasis(const Field& field, Elem gamma) : field_(field), gamma_(gamma) {
    field.check(gamma);
    minpoly_ = gamma.bits == 0 ? 2 : field.minimal_polynomial(gamma);
    const int d = degree(minpoly_);
    Elem p = field.one();
    for (int j = 0; j < d; ++j) {
      powers_.push_back(p);
      insert(p.bits, std::uint64_t{1} << j);
      p = field.mul(p, gamma);
    }
  }

  const Field& field() const noexcept { return field_; }
  Elem gamma() const noexcept { return gamma_; }
  Poly minimal_polynomial() const noexcept { return minpoly_; }
  unsigned dim() const noexcept { return static_cast<unsigned>(powers_.size()); }

  Elem instantiate(Poly coords) const {
    require(degree(coords) < static_cast<int>(dim()),
            "gamma-relative value 0x" + to_hex(coords) + " exceeds basis dimension");
    Elem acc = field_.zero();
    for (unsigned j = 0; j < dim(); ++j) {
      if ((coords >> j) & 1) acc = field_.add(acc, powers_[j]);
    }
    return acc;
  }

  /// Inverse of instantiate; fails when a is outside F_2(gamma).
  Poly coords_of(Elem a) const {
    std::uint64_t v = a.bits, mask = 0;
    for (const Row& row : rows_) {
      if ((v >> row.pivot) & 1) {
        v ^= row.bits;
        mask ^= row.combo;
      }
    }
    if (v != 0) {
      fail(ErrorKind::kContractViolation,
           "element 0x" + to_hex(a.bits) + " is not in the subfield generated by gamma");
    }
    return mask;
  }

 private:
  struct Row {
    int pivot;
    std::uint64_t bits;
    std::uint64_t combo;
  };

  void insert(std::uint64_t v, std::uint64_t combo) {
    for (const Row& row : rows_) {
      if ((v >> row.pivot) & 1) {
        v ^= row.bits;
        combo ^= row.combo;
      }
    }
    if (v == 0) fail(ErrorKind::kInternal, "gamma powers are linearly dependent");
    const int pivot = degree(v);
    for (Row& row : rows_) {
      if ((row.bits >> pivot) & 1) {
        row.bits ^= v;
        row.combo ^= combo;
      }
    }
    rows_.push_back({pivot, v, combo});
  }

  Field field_;
  Elem gamma_;
  Poly minpoly_ = 0;
  std::vector<Elem> powers_;
  std::vector<Row> rows_;
};

}  // namespace mvldc::gf2
