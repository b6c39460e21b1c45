#include <gtest/gtest.h>

#include <numeric>

#include "mvldc/compose.hpp"
#include "oracles.hpp"

using namespace mvldc;
using namespace mvldc::compose;
using gf2::Elem;

namespace {

DecodingPolynomial canon(std::uint64_t m) { return canonical_for_modulus(zmod::factorize(m)); }

}  // namespace

TEST(Plan, FiveElevenTimesThree) {
  const DecodingPolynomial p1 = decpoly::known_511_polynomial();
  const DecodingPolynomial p2 = canon(3);
  const CompositionPlan pl = plan(p1, p2);
  EXPECT_EQ(pl.m.value(), 1533u);
  EXPECT_EQ(pl.t1, 9u);
  EXPECT_EQ(pl.t2, 2u);
  EXPECT_EQ(pl.t(), 18u);
  EXPECT_EQ(pl.big.element_order(pl.gamma.element), 1533u);
  EXPECT_EQ(pl.big.element_order(pl.gamma1.element), 511u);
  EXPECT_EQ(pl.big.element_order(pl.gamma2.element), 3u);
  // gamma1 is a root of the 511 polynomial's minimal polynomial
  EXPECT_EQ(pl.big.eval(0x211, pl.gamma1.element), pl.big.zero());
  EXPECT_EQ(std::gcd(pl.h1, 511u), 1u);
  EXPECT_EQ(std::gcd(pl.h2, 3u), 1u);
  // gamma^(h1 m2) = gamma1 and gamma^(h2 m1) = gamma2, checked with the naive multiplier
  const std::uint64_t f = pl.big.modulus(), g = pl.gamma.element.bits;
  EXPECT_EQ(oracle::gf_pow(g, std::uint64_t{pl.h1} * 3, f), pl.gamma1.element.bits);
  EXPECT_EQ(oracle::gf_pow(g, std::uint64_t{pl.h2} * 511, f), pl.gamma2.element.bits);
  EXPECT_EQ(gf2::degree(pl.gamma_minpoly()), 18);
}

TEST(Plan, Rejects) {
  EXPECT_THROW(plan(canon(15), canon(3)), Error);   // not coprime
  EXPECT_THROW(plan(canon(15), canon(21)), Error);  // not coprime
  // ord_{511*2047... } too large: 511 (t=9) with 23 (t=11) gives t=99
  EXPECT_THROW(plan(decpoly::known_511_polynomial(), canon(23)), Error);
}

TEST(Compose, KnownTimesThree) {
  const DecodingPolynomial p1 = decpoly::known_511_polynomial();
  const DecodingPolynomial p2 = canon(3);
  ASSERT_EQ(p2.k(), 2u);
  const CompositionPlan pl = plan(p1, p2);
  const DecodingPolynomial p = compose_polynomials(pl, p1, p2);
  EXPECT_EQ(p.m(), 1533u);
  EXPECT_EQ(p.t1(), 18u);
  EXPECT_LE(p.k(), 6u);

  const zmod::CanonicalSet s = zmod::canonical_set(pl.m);
  ASSERT_EQ(s.size(), 7u);
  EXPECT_TRUE(decpoly::verify_decoding(p, s.elements(), pl.big, pl.gamma).valid);

  // the home-field reading of the output is equally valid
  const decpoly::HomeContext ctx = decpoly::home_context(p);
  EXPECT_TRUE(decpoly::verify_decoding(p, s.elements(), ctx.field, ctx.gamma).valid);

  const auto zeros = factorwise_zeros(pl, p1, p2);
  ASSERT_EQ(zeros.size(), 7u);
  for (const FactorZero& z : zeros) {
    EXPECT_TRUE(z.first || z.second) << z.s;
    EXPECT_EQ(z.s1, z.s % 511);
    EXPECT_EQ(z.s2, z.s % 3);
    // P1 vanishes exactly when s mod 511 is in S_511, P2 when s mod 3 = 1
    EXPECT_EQ(z.first, z.s1 != 0) << z.s;
    EXPECT_EQ(z.second, z.s2 != 0) << z.s;
  }
}

TEST(Compose, MatchesDirectProduct) {
  // Evaluate P1(gamma^(h1 m2 s)) * P2(gamma^(h2 m1 s)) directly and compare.
  const DecodingPolynomial p1 = canon(15);
  const DecodingPolynomial p2 = canon(7);
  const CompositionPlan pl = plan(p1, p2);
  const DecodingPolynomial p = compose_polynomials(pl, p1, p2);
  EXPECT_LE(p.k(), p1.k() * p2.k());
  const decpoly::Instantiated ip(p, pl.big, pl.gamma);
  const decpoly::Instantiated i1(p1, pl.big, pl.gamma1);
  const decpoly::Instantiated i2(p2, pl.big, pl.gamma2);
  for (std::uint64_t s = 0; s < 105; ++s) {
    const Elem lhs = ip.at_power(s);
    const Elem rhs = pl.big.mul(i1.at_power(s), i2.at_power(s));
    ASSERT_EQ(lhs, rhs) << s;
  }
}

TEST(Compose, PairsOfCanonicalPolynomials) {
  const std::pair<std::uint64_t, std::uint64_t> pairs[] = {
      {3, 5}, {3, 7}, {5, 7}, {7, 9}, {15, 7}, {21, 5}, {9, 5}, {3, 73}};
  for (auto [a, b] : pairs) {
    const DecodingPolynomial p1 = canon(a), p2 = canon(b);
    const CompositionPlan pl = plan(p1, p2);
    EXPECT_EQ(pl.t(), std::lcm(pl.t1, pl.t2));
    const DecodingPolynomial p = compose_polynomials(pl, p1, p2);
    EXPECT_LE(p.k(), p1.k() * p2.k()) << a << "*" << b;
    const zmod::CanonicalSet s = zmod::canonical_set(pl.m);
    EXPECT_TRUE(decpoly::verify_decoding(p, s.elements(), pl.big, pl.gamma).valid);
  }
}

TEST(Compose, RejectsNonDecodingInput) {
  const DecodingPolynomial p1 = decpoly::known_511_polynomial();
  DecodingPolynomial bad = canon(3);
  bad.terms[0].coef ^= 1;
  bad.terms[1].coef ^= 1;
  const CompositionPlan pl = plan(p1, canon(3));
  EXPECT_THROW(compose_polynomials(pl, p1, bad), Error);
  EXPECT_THROW(compose_polynomials(pl, canon(3), p1), Error);
}

TEST(Compose, PrimeChain) {
  // 511 * 3 * 5: t = lcm(9, 2, 4) = 36
  const std::uint32_t primes[] = {3, 5};
  const auto steps = compose_with_primes(decpoly::known_511_polynomial(), primes);
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_EQ(steps[0].result.m(), 1533u);
  EXPECT_LE(steps[0].result.k(), 6u);
  EXPECT_EQ(steps[1].result.m(), 7665u);
  EXPECT_EQ(steps[1].plan.t(), 36u);
  EXPECT_LE(steps[1].result.k(), 12u);
  const zmod::CanonicalSet s = zmod::canonical_set(steps[1].plan.m);
  EXPECT_EQ(s.size(), 15u);
  EXPECT_TRUE(decpoly::verify_decoding(steps[1].result, s.elements(), steps[1].plan.big,
                                       steps[1].plan.gamma)
                  .valid);
  const std::uint32_t not_prime[] = {9};
  EXPECT_THROW(compose_with_primes(decpoly::known_511_polynomial(), not_prime), Error);
}

TEST(ComposeCodes, EndToEndSmall) {
  const DecodingPolynomial p1 = canon(3), p2 = canon(5);
  const CompositionPlan pl = plan(p1, p2);
  const DecodingPolynomial p = compose_polynomials(pl, p1, p2);
  auto fam = mvfam::search_family(pl.m, 4, 3);
  ASSERT_TRUE(fam.family);
  const ldc::Code code = compose_codes(pl, p, *fam.family);
  EXPECT_EQ(code.k(), p.k());
  for (std::size_t i = 0; i < code.n(); ++i) EXPECT_TRUE(ldc::verify_smoothness(code, i).ok());

  auto other = mvfam::search_family(zmod::factorize(21), 3, 2);
  ASSERT_TRUE(other.family);
  EXPECT_THROW(compose_codes(pl, p, *other.family), Error);
}
