#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "mvldc/mvfam.hpp"
#include "oracles.hpp"

using namespace mvldc;
using namespace mvldc::mvfam;
using zmod::Residue;
using zmod::ZVector;

namespace {

using Vec = std::vector<std::uint64_t>;

std::uint64_t dot(const Vec& a, const Vec& b, std::uint64_t m) {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s % m;
}

std::vector<Vec> all_vectors(std::uint64_t m, std::size_t h) {
  std::vector<Vec> out{Vec{}};
  for (std::size_t j = 0; j < h; ++j) {
    std::vector<Vec> next;
    for (const Vec& v : out) {
      for (std::uint64_t x = 0; x < m; ++x) {
        Vec w = v;
        w.push_back(x);
        next.push_back(w);
      }
    }
    out = next;
  }
  return out;
}

/// Largest S_m-matching family in Z_m^h, capped at `cap`, by plain recursion.
std::size_t brute_max_family(std::uint64_t m, std::size_t h, std::size_t cap) {
  const auto s = oracle::canonical_set(m);
  std::vector<Vec> iso;
  for (const Vec& v : all_vectors(m, h)) {
    if (dot(v, v, m) == 0) iso.push_back(v);
  }
  std::size_t best = 0;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    best = std::max(best, chosen.size());
    if (best >= cap) return;
    for (std::size_t a = from; a < iso.size(); ++a) {
      bool ok = true;
      for (std::size_t b : chosen) ok = ok && s.count(dot(iso[a], iso[b], m));
      if (!ok) continue;
      chosen.push_back(a);
      rec(a + 1);
      chosen.pop_back();
      if (best >= cap) return;
    }
  };
  rec(0);
  return best;
}

MatchingFamily make(std::uint32_t m, std::vector<std::vector<Residue>> rows) {
  MatchingFamily f;
  f.m = m;
  f.h = rows.at(0).size();
  const zmod::CanonicalSet s = zmod::canonical_set(zmod::factorize(m));
  f.target = s.sorted();
  for (auto& r : rows) f.vectors.emplace_back(m, std::move(r));
  return f;
}

}  // namespace

TEST(VerifyFamily, AcceptsAndPinpoints) {
  // 3*3 + 6*6 = 45 = 0, 3*6 + 6*3 = 36 = 6 mod 15
  EXPECT_TRUE(verify_family(make(15, {{0, 0, 3, 6}, {0, 0, 6, 3}})).valid);

  const FamilyReport bad_self = verify_family(make(15, {{1, 0}, {0, 0}}));
  EXPECT_FALSE(bad_self.valid);
  EXPECT_EQ(bad_self.i, 0u);
  EXPECT_EQ(bad_self.j, 0u);
  EXPECT_EQ(bad_self.value, 1u);

  const FamilyReport bad_pair = verify_family(make(15, {{0, 0}, {0, 0}}));
  EXPECT_FALSE(bad_pair.valid);
  EXPECT_EQ(bad_pair.i, 0u);
  EXPECT_EQ(bad_pair.j, 1u);
  EXPECT_EQ(bad_pair.value, 0u);
}

TEST(VerifyFamily, ShapeErrors) {
  MatchingFamily f = make(15, {{0, 0, 3, 6}});
  f.vectors.emplace_back(15, std::vector<Residue>{0, 0});
  EXPECT_THROW(verify_family(f), Error);
  MatchingFamily g = make(15, {{0, 0, 3, 6}});
  g.target = {0};
  EXPECT_THROW(verify_family(g), Error);
}

struct Case {
  std::uint32_t m;
  std::size_t h;
  std::size_t n;
};

class SearchVsBrute : public ::testing::TestWithParam<Case> {};

TEST_P(SearchVsBrute, ExistenceAgrees) {
  const Case c = GetParam();
  const bool exists = brute_max_family(c.m, c.h, c.n) >= c.n;
  const FamilySearchResult r = search_family(zmod::factorize(c.m), c.h, c.n);
  ASSERT_NE(r.status, SearchStatus::kBudgetExceeded);
  EXPECT_EQ(r.status == SearchStatus::kFound, exists)
      << "m=" << c.m << " h=" << c.h << " n=" << c.n;
  if (r.family) {
    EXPECT_EQ(r.family->size(), c.n);
    EXPECT_TRUE(verify_family(*r.family).valid);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Small, SearchVsBrute,
    ::testing::Values(Case{3, 1, 2}, Case{3, 2, 2}, Case{3, 3, 2}, Case{3, 3, 3}, Case{3, 4, 3},
                      Case{3, 4, 4}, Case{5, 2, 2}, Case{5, 3, 3}, Case{7, 2, 2},
                      Case{15, 1, 2}, Case{15, 2, 2}, Case{15, 2, 3}, Case{15, 3, 3},
                      Case{21, 2, 2}, Case{21, 2, 3}));

TEST(Search, DeterministicAcrossThreadsAndSeeds) {
  const auto mod = zmod::factorize(15);
  SearchOptions a, b;
  a.threads = 1;
  b.threads = 6;
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    a.seed = b.seed = seed;
    const auto ra = search_family(mod, 4, 3, a);
    const auto rb = search_family(mod, 4, 3, b);
    ASSERT_TRUE(ra.family && rb.family);
    EXPECT_EQ(ra.family->vectors, rb.family->vectors) << seed;
    EXPECT_TRUE(verify_family(*ra.family).valid);
  }
}

TEST(Search, BudgetAndLimits) {
  SearchOptions opt;
  opt.node_budget = 1;
  const auto r = search_family(zmod::factorize(15), 3, 4, opt);
  EXPECT_EQ(r.status, SearchStatus::kBudgetExceeded);
  EXPECT_THROW(search_family(zmod::factorize(15), 8, 2), Error);
  EXPECT_THROW(search_family(zmod::factorize(15), 0, 2), Error);
}

TEST(Search, CustomTarget) {
  // Isotropic vectors of Z_15^2 vanish mod 3, so <u, w> = 5 is impossible there.
  const Residue five[] = {5};
  EXPECT_EQ(search_family(zmod::factorize(15), 2, 2, five).status, SearchStatus::kExhausted);
  const Residue six[] = {6};
  const auto r = search_family(zmod::factorize(15), 2, 2, six);
  ASSERT_TRUE(r.family);
  EXPECT_EQ(r.family->target, std::vector<Residue>{6});
  EXPECT_EQ(zmod::inner_product(r.family->vectors[0], r.family->vectors[1]), 6u);
}

TEST(Search, Composite1533HasPair) {
  const auto r = search_family(zmod::factorize(1533), 2, 2);
  ASSERT_TRUE(r.family);
  // -1 is a non-residue mod 3 and 7, so isotropic vectors vanish mod 21
  for (const auto& v : r.family->vectors) {
    for (Residue x : v.coords()) EXPECT_EQ(x % 21, 0u);
  }
}

TEST(SetSystem, IncidenceVectors) {
  // |H1| = |H2| = 3 = 0 mod 3, |H1 n H2| = 1 in S_3
  SetSystem sys;
  sys.universe = 5;
  sys.sets = {{1, 2, 3}, {3, 4, 5}};
  const MatchingFamily f = family_from_set_system(sys, zmod::factorize(3));
  EXPECT_EQ(f.h, 5u);
  EXPECT_EQ(f.vectors[0], ZVector(3, {1, 1, 1, 0, 0}));
  EXPECT_EQ(f.vectors[1], ZVector(3, {0, 0, 1, 1, 1}));
  EXPECT_TRUE(verify_family(f).valid);

  sys.sets = {{1, 2, 3}, {1, 2, 3}};
  EXPECT_THROW(family_from_set_system(sys, zmod::factorize(3)), Error);
  sys.sets = {{1, 2}, {3, 4, 5}};
  EXPECT_THROW(family_from_set_system(sys, zmod::factorize(3)), Error);
  sys.sets = {{1, 2, 6}};
  EXPECT_THROW(family_from_set_system(sys, zmod::factorize(3)), Error);
  sys.sets = {{1, 1, 2}};
  EXPECT_THROW(family_from_set_system(sys, zmod::factorize(3)), Error);
}
