#include <gtest/gtest.h>

#include <random>

#include "mvldc/compose.hpp"
#include "mvldc/ldc.hpp"
#include "mvldc/mvfam.hpp"
#include "code_oracles.hpp"

using namespace mvldc;
using namespace mvldc::ldc;
using gf2::Elem;
using zmod::Residue;
using zmod::ZVector;
using oracle::digits;
using oracle::naive_decode;
using oracle::naive_encode;

namespace {

Code make_code(std::uint32_t m, std::size_t h, std::size_t n, std::uint64_t seed = 0) {
  const zmod::Modulus mod = zmod::factorize(m);
  decpoly::DecodingPolynomial p = compose::canonical_for_modulus(mod);
  decpoly::HomeContext ctx = decpoly::home_context(p);
  mvfam::SearchOptions opt;
  opt.seed = seed;
  auto r = mvfam::search_family(mod, h, n, opt);
  if (!r.family) throw std::runtime_error("no family");
  return Code(std::move(ctx.field), ctx.gamma, std::move(*r.family), std::move(p));
}

}  // namespace

TEST(Index, LittleEndianMixedRadix) {
  const Code c = make_code(3, 4, 2);
  EXPECT_EQ(c.length(), 81u);
  EXPECT_EQ(c.index(ZVector(3, {2, 1, 0, 0})), 5u);
  EXPECT_EQ(c.index(ZVector(3, {0, 0, 0, 1})), 27u);
  EXPECT_EQ(c.deindex(5), ZVector(3, {2, 1, 0, 0}));
  for (std::uint64_t i = 0; i < c.length(); ++i) ASSERT_EQ(c.index(c.deindex(i)), i);
  EXPECT_THROW(c.deindex(81), Error);
  EXPECT_THROW(c.index(ZVector(3, {1, 1})), Error);
}

TEST(Encode, MatchesDefinition) {
  const Code c = make_code(15, 4, 3);
  std::mt19937_64 rng(1);
  std::vector<Elem> x(c.n());
  for (auto& e : x) e.bits = rng() & c.field().group_order();
  const Codeword w = c.encode(x);
  EXPECT_EQ(w.m, 15u);
  EXPECT_EQ(w.h, 4u);
  EXPECT_EQ(w.t, 4u);
  const auto ref = naive_encode(c, x);
  ASSERT_EQ(w.size(), ref.size());
  for (std::uint64_t p = 0; p < ref.size(); ++p) ASSERT_EQ(w.symbols[p].bits, ref[p]) << p;

  // linearity: C(x + y) = C(x) + C(y)
  std::vector<Elem> y(c.n()), xy(c.n());
  for (std::size_t i = 0; i < c.n(); ++i) {
    y[i].bits = rng() & c.field().group_order();
    xy[i] = c.field().add(x[i], y[i]);
  }
  const Codeword wy = c.encode(y), wxy = c.encode(xy);
  for (std::uint64_t p = 0; p < w.size(); p += 97) {
    EXPECT_EQ(wxy.symbols[p], c.field().add(w.symbols[p], wy.symbols[p]));
  }
  EXPECT_THROW(c.encode(std::vector<Elem>(2)), Error);
  EXPECT_THROW(c.encode(std::vector<Elem>{Elem{0}, Elem{16}, Elem{0}}), Error);
}

TEST(Decode, ExactOverAllPointsAgainstNaive) {
  const Code c = make_code(15, 4, 3);
  std::mt19937_64 rng(2);
  std::vector<Elem> x(c.n());
  for (auto& e : x) e.bits = rng() & c.field().group_order();
  const Codeword w = c.encode(x);
  std::vector<std::uint64_t> raw(w.size());
  for (std::size_t p = 0; p < raw.size(); ++p) raw[p] = w.symbols[p].bits;
  for (std::size_t i = 0; i < c.n(); ++i) {
    for (std::uint64_t v = 0; v < c.length(); v += 13) {
      const auto vd = digits(v, c.m(), c.h());
      ASSERT_EQ(naive_decode(c, i, raw, vd), x[i].bits);
      ASSERT_EQ(c.decode_at(i, w, ZVector(c.m(), vd)), x[i]);
    }
  }
}

TEST(Decode, BasisCodewordsGiveKroneckerDelta) {
  const Code c = make_code(15, 4, 3);
  for (std::size_t j = 0; j < c.n(); ++j) {
    const Codeword e = c.basis_codeword(j);
    for (std::size_t i = 0; i < c.n(); ++i) {
      for (std::uint64_t v = 0; v < c.length(); ++v) {
        const Elem got = c.decode_at(i, e, c.deindex(v));
        ASSERT_EQ(got, i == j ? c.field().one() : c.field().zero()) << i << " " << j << " " << v;
      }
    }
  }
}

TEST(Decode, QueriesAreShiftedPositions) {
  const Code c = make_code(15, 4, 3);
  const ZVector v(15, {1, 2, 3, 4});
  const DecoderQuery q = c.decode_queries(1, v);
  ASSERT_EQ(q.indices.size(), c.k());
  for (std::size_t j = 0; j < c.k(); ++j) {
    EXPECT_EQ(q.positions[j], v.axpy(c.exponents()[j], c.family().vectors[1]));
    EXPECT_EQ(q.indices[j], c.index(q.positions[j]));
    EXPECT_EQ(q.indices[j], c.shifted_index(c.index(v), 1, j));
  }
}

TEST(Smoothness, EverySlotIsABijection) {
  const Code c = make_code(15, 4, 3);
  const auto basis = basis_codewords(c);
  for (std::size_t i = 0; i < c.n(); ++i) {
    const SmoothnessReport r = verify_smoothness(c, i, basis);
    EXPECT_TRUE(r.ok()) << i;
    EXPECT_TRUE(r.enumerated);
  }
  // Independently: count hits per position for slot 0 of member 0.
  std::vector<int> hits(c.length(), 0);
  for (std::uint64_t v = 0; v < c.length(); ++v) ++hits[c.shifted_index(v, 0, 0)];
  for (int h : hits) ASSERT_EQ(h, 1);
}

TEST(Code, RejectsMismatchedInputs) {
  const zmod::Modulus mod = zmod::factorize(15);
  decpoly::DecodingPolynomial p = compose::canonical_for_modulus(mod);
  decpoly::HomeContext ctx = decpoly::home_context(p);
  mvfam::MatchingFamily bad;
  bad.m = 15;
  bad.h = 2;
  bad.target = {1, 6, 10};
  bad.vectors = {ZVector(15, {1, 0})};
  EXPECT_THROW(Code(ctx.field, ctx.gamma, bad, p), Error);

  mvfam::SetSystem sys;
  sys.universe = 5;
  sys.sets = {{1, 2, 3}, {3, 4, 5}};
  const auto fam3 = mvfam::family_from_set_system(sys, zmod::factorize(3));
  EXPECT_THROW(Code(ctx.field, ctx.gamma, fam3, p), Error);

  // a polynomial that does not vanish on the family's S
  auto fam = mvfam::search_family(mod, 4, 2);
  decpoly::DecodingPolynomial q = p;
  q.terms[1].coef ^= 1;
  q.terms[0].coef ^= 1;
  EXPECT_THROW(Code(ctx.field, ctx.gamma, *fam.family, q), Error);
}

TEST(Words, CheckShape) {
  const Code c = make_code(15, 4, 3);
  Codeword w = c.empty_word();
  EXPECT_NO_THROW(c.check_word(w));
  Codeword short_w = w;
  short_w.symbols.pop_back();
  EXPECT_THROW(c.check_word(short_w), Error);
  Codeword other = w;
  other.field_modulus = 0x19;
  EXPECT_THROW(c.check_word(other), Error);
  Codeword wide = w;
  wide.symbols[3].bits = 16;
  EXPECT_NO_THROW(c.check_word(wide));
  EXPECT_THROW(c.check_symbols(wide), Error);
  EXPECT_EQ(hamming_distance(w, wide), 1u);
}

TEST(Corrupt, BudgetsAndModes) {
  const Code c = make_code(15, 4, 3);
  const Codeword w = c.encode(std::vector<Elem>{Elem{1}, Elem{2}, Elem{3}});
  EXPECT_EQ(corruption_budget(0.05, 50625), 2531u);
  EXPECT_THROW(corruption_budget(0.5, 10), Error);
  EXPECT_THROW(corruption_budget(-0.1, 10), Error);

  std::mt19937_64 rng(4);
  TrialConfig cfg;
  cfg.delta = 0.1;
  const Codeword u = corrupt(w, cfg, rng);
  EXPECT_EQ(hamming_distance(w, u), corruption_budget(0.1, w.size()));

  cfg.mode = CorruptionMode::kAdversarial;
  cfg.positions = block_pattern(0.1, w.size());
  const Codeword a = corrupt(w, cfg, rng);
  EXPECT_EQ(hamming_distance(w, a), cfg.positions.size());
  for (std::uint64_t p = 0; p < cfg.positions.size(); ++p) EXPECT_NE(a.symbols[p], w.symbols[p]);
  EXPECT_EQ(a.symbols[cfg.positions.size()], w.symbols[cfg.positions.size()]);

  cfg.positions.push_back(cfg.positions.size());
  EXPECT_THROW(corrupt(w, cfg, rng), Error);
  cfg.positions = {1, 1};
  EXPECT_THROW(corrupt(w, cfg, rng), Error);
  cfg.positions = {w.size()};
  EXPECT_THROW(corrupt(w, cfg, rng), Error);
}

TEST(Trials, CleanWordNeverFails) {
  const Code c = make_code(15, 4, 3);
  TrialConfig cfg;
  cfg.trials = 2000;
  const TrialReport r = run_trials(c, std::vector<Elem>{Elem{7}, Elem{0}, Elem{9}}, 2, cfg);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_EQ(r.corrupted, 0u);
  EXPECT_EQ(r.bound, 0.0);
}

TEST(Trials, FailureRateWithinUnionBound) {
  const Code c = make_code(15, 4, 3);
  for (CorruptionMode mode : {CorruptionMode::kUniform, CorruptionMode::kAdversarial}) {
    TrialConfig cfg;
    cfg.delta = 0.05;
    cfg.trials = 20000;
    cfg.seed = 9;
    cfg.mode = mode;
    if (mode == CorruptionMode::kAdversarial) cfg.positions = block_pattern(cfg.delta, c.length());
    const TrialReport r = run_trials(c, std::vector<Elem>{Elem{7}, Elem{1}, Elem{9}}, 0, cfg);
    EXPECT_DOUBLE_EQ(r.bound, 4 * 0.05);
    EXPECT_LE(r.rate, r.bound + 3 * r.std_error);
    EXPECT_LE(r.wilson_low, r.rate);
    EXPECT_GE(r.wilson_high, r.rate);
    EXPECT_GT(r.failures, 0u);
  }
}

TEST(Trials, Deterministic) {
  const Code c = make_code(15, 4, 3);
  TrialConfig cfg;
  cfg.delta = 0.2;
  cfg.trials = 3000;
  cfg.seed = 5;
  const std::vector<Elem> x{Elem{7}, Elem{1}, Elem{9}};
  EXPECT_EQ(run_trials(c, x, 1, cfg).failures, run_trials(c, x, 1, cfg).failures);
}

TEST(Wilson, Bounds) {
  double lo = 0, hi = 0;
  wilson_interval(0, 100, lo, hi);
  EXPECT_EQ(lo, 0.0);
  EXPECT_GT(hi, 0.0);
  wilson_interval(50, 100, lo, hi);
  EXPECT_NEAR(lo, 0.4038, 1e-3);
  EXPECT_NEAR(hi, 0.5962, 1e-3);
}
