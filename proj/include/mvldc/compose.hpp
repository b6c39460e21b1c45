#pragma once

// Composition of decoding polynomials over coprime moduli m1, m2:
//
//   P(x) = P1(x^(h1*m2)) * P2(x^(h2*m1))
//
// is an S_{m1*m2}-decoding polynomial with at most k1*k2 monomials, where
// gamma has order m1*m2 in GF(2^lcm(t1,t2)) and the twist exponents satisfy
// gamma^(h1*m2) = gamma1, gamma^(h2*m1) = gamma2 for roots gamma1, gamma2 of
// the sub-polynomials' minimal polynomials.

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mvldc/decpoly.hpp"
#include "mvldc/error.hpp"
#include "mvldc/gf2.hpp"
#include "mvldc/ldc.hpp"
#include "mvldc/mvfam.hpp"
#include "mvldc/zmod.hpp"

namespace mvldc::compose {

using decpoly::DecodingPolynomial;
using gf2::Elem;
using zmod::Residue;

struct CompositionPlan {
  zmod::Modulus m1;
  zmod::Modulus m2;
  zmod::Modulus m;
  unsigned t1 = 0;
  unsigned t2 = 0;
  gf2::Field big;
  gf2::OrderMElement gamma;
  gf2::OrderMElement gamma1;
  gf2::OrderMElement gamma2;
  std::uint32_t h1 = 0;
  std::uint32_t h2 = 0;

  unsigned t() const noexcept { return big.degree(); }
  gf2::Poly gamma_minpoly() const { return big.minimal_polynomial(gamma.element); }
};

/// Builds GF(2^t), t = lcm(t1, t2), an order-m gamma, the lifted sub-gammas
/// and the twist exponents. All invariants are replayed before returning.
inline CompositionPlan plan(const DecodingPolynomial& p1, const DecodingPolynomial& p2) {
  const std::uint32_t a = p1.m(), b = p2.m();
  require(std::gcd(a, b) == 1, "composition needs coprime moduli, got " + std::to_string(a) +
                                   " and " + std::to_string(b));
  const std::uint64_t prod = std::uint64_t{a} * b;
  const zmod::Modulus m = zmod::factorize(prod);
  const unsigned t1 = gf2::mult_order_of_2(p1.mod);
  const unsigned t2 = gf2::mult_order_of_2(p2.mod);
  const unsigned t = gf2::mult_order_of_2(m);
  if (t != std::lcm(t1, t2)) fail(ErrorKind::kInternal, "ord_m(2) != lcm(t1, t2)");
  if (t > gf2::kMaxDegree) {
    fail(ErrorKind::kLimitExceeded, "composed field degree " + std::to_string(t) + " exceeds 40");
  }
  gf2::Field big(t);
  const gf2::OrderMElement gamma = gf2::find_order_m_element(big, prod);
  const gf2::OrderMElement g1 =
      gf2::as_order_m(big, gf2::find_subfield_copy(big, p1.gamma_minpoly), a);
  const gf2::OrderMElement g2 =
      gf2::as_order_m(big, gf2::find_subfield_copy(big, p2.gamma_minpoly), b);
  const std::uint32_t h1 = gf2::find_twist_exponent(big, gamma, a, g1);
  const std::uint32_t h2 = gf2::find_twist_exponent(big, gamma, b, g2);

  if (big.pow(gamma.element, std::uint64_t{h1} * b) != g1.element ||
      big.pow(gamma.element, std::uint64_t{h2} * a) != g2.element) {
    fail(ErrorKind::kInternal, "twist exponents do not reproduce the sub-gammas");
  }
  return CompositionPlan{p1.mod, p2.mod, m, t1, t2, std::move(big), gamma, g1, g2, h1, h2};
}

/// Per s in S_m: which factor vanishes at gamma^s.
struct FactorZero {
  Residue s = 0;
  Residue s1 = 0;  // s mod m1
  Residue s2 = 0;  // s mod m2
  bool first = false;   // P1(gamma1^s) = 0
  bool second = false;  // P2(gamma2^s) = 0
};

inline std::vector<FactorZero> factorwise_zeros(const CompositionPlan& pl,
                                                const DecodingPolynomial& p1,
                                                const DecodingPolynomial& p2) {
  const decpoly::Instantiated i1(p1, pl.big, pl.gamma1);
  const decpoly::Instantiated i2(p2, pl.big, pl.gamma2);
  std::vector<FactorZero> out;
  const zmod::CanonicalSet set = zmod::canonical_set(pl.m);
  for (Residue s : set.elements()) {
    const auto [s1, s2] = zmod::split_canonical(s, pl.m1, pl.m2);
    out.push_back({s, s1, s2, i1.at_power(s) == pl.big.zero(), i2.at_power(s) == pl.big.zero()});
  }
  return out;
}

/// P1(x^(h1 m2)) * P2(x^(h2 m1)), canonicalized and verified against S_m.
inline DecodingPolynomial compose_polynomials(const CompositionPlan& pl,
                                              const DecodingPolynomial& p1,
                                              const DecodingPolynomial& p2) {
  require(p1.m() == pl.m1.value() && p2.m() == pl.m2.value(),
          "compose_polynomials: polynomials do not match the plan");
  const std::uint32_t m = pl.m.value();
  const zmod::CanonicalSet s1 = zmod::canonical_set(pl.m1);
  const zmod::CanonicalSet s2 = zmod::canonical_set(pl.m2);
  if (!decpoly::verify_decoding(p1, s1.elements(), pl.big, pl.gamma1).valid ||
      !decpoly::verify_decoding(p2, s2.elements(), pl.big, pl.gamma2).valid) {
    fail(ErrorKind::kInvalidArgument, "sub-polynomials must be S_m1- and S_m2-decoding");
  }
  const gf2::GammaBasis b1(pl.big, pl.gamma1.element);
  const gf2::GammaBasis b2(pl.big, pl.gamma2.element);
  const gf2::GammaBasis b(pl.big, pl.gamma.element);
  const std::uint64_t twist1 = std::uint64_t{pl.h1} * pl.m2.value() % m;
  const std::uint64_t twist2 = std::uint64_t{pl.h2} * pl.m1.value() % m;

  std::vector<decpoly::Term> terms;
  for (const decpoly::Term& x : p1.terms) {
    const Elem cx = b1.instantiate(x.coef);
    for (const decpoly::Term& y : p2.terms) {
      const Elem c = pl.big.mul(cx, b2.instantiate(y.coef));
      const std::uint64_t e = (zmod::mulmod(x.exp, twist1, m) + zmod::mulmod(y.exp, twist2, m)) % m;
      terms.push_back({b.coords_of(c), static_cast<Residue>(e)});
    }
  }
  DecodingPolynomial p = decpoly::canonicalize(pl.m, b.minimal_polynomial(), terms);

  if (p.k() > p1.k() * p2.k()) fail(ErrorKind::kInternal, "composed polynomial has k > k1*k2");
  const zmod::CanonicalSet s = zmod::canonical_set(pl.m);
  if (auto chk = decpoly::verify_decoding(p, s.elements(), pl.big, pl.gamma); !chk.valid) {
    fail(ErrorKind::kInternal, "composed polynomial failed verification: " + chk.describe());
  }
  for (const FactorZero& z : factorwise_zeros(pl, p1, p2)) {
    if (!z.first && !z.second) {
      fail(ErrorKind::kInternal, "neither factor vanishes at s = " + std::to_string(z.s));
    }
  }
  return p;
}

/// The composed code: same encoder and decoder, over the plan's big field.
inline ldc::Code compose_codes(const CompositionPlan& pl, const DecodingPolynomial& p,
                               mvfam::MatchingFamily family) {
  if (family.m != pl.m.value() || p.m() != pl.m.value()) {
    fail(ErrorKind::kInvalidArgument, "family/polynomial modulus does not match the plan's m = " +
                                          std::to_string(pl.m.value()));
  }
  return ldc::Code(pl.big, pl.gamma, std::move(family), p);
}

/// Product-of-roots polynomial for a single modulus in its own field.
inline DecodingPolynomial canonical_for_modulus(const zmod::Modulus& mod) {
  const gf2::Field field(gf2::mult_order_of_2(mod));
  const gf2::OrderMElement gamma = gf2::find_order_m_element(field, mod.value());
  const zmod::CanonicalSet s = zmod::canonical_set(mod);
  return decpoly::canonical_polynomial(s.elements(), field, gamma);
}

struct CompositionStep {
  CompositionPlan plan;
  DecodingPolynomial result;
};

/// Composes `base` with the canonical 2-monomial polynomial of each odd prime
/// in turn (S_p = {1}), one prime at a time.
inline std::vector<CompositionStep> compose_with_primes(DecodingPolynomial base,
                                                        std::span<const std::uint32_t> primes) {
  std::vector<CompositionStep> steps;
  for (std::uint32_t p : primes) {
    const zmod::Modulus mp = zmod::factorize(p);
    require(mp.r() == 1 && mp.factors()[0].exponent == 1,
            std::to_string(p) + " is not an odd prime");
    const DecodingPolynomial q = canonical_for_modulus(mp);
    CompositionPlan pl = plan(base, q);
    base = compose_polynomials(pl, base, q);
    steps.push_back({std::move(pl), base});
  }
  return steps;
}

}  // namespace mvldc::compose
