#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mvldc/io.hpp"

using namespace mvldc;
using io::Json;

namespace {

mvfam::MatchingFamily family15() {
  auto r = mvfam::search_family(zmod::factorize(15), 4, 3);
  if (!r.family) throw std::runtime_error("no family");
  return *r.family;
}

}  // namespace

TEST(Family, RoundTrip) {
  const mvfam::MatchingFamily f = family15();
  const Json j = io::to_json(f);
  EXPECT_EQ(j.begin().key(), "m");
  EXPECT_EQ(j["S"], Json::parse("[1, 6, 10]"));
  const mvfam::MatchingFamily g = io::family_from_json(io::parse_json(j.dump()));
  EXPECT_EQ(f, g);
}

TEST(Family, NegativeCoordinatesReduce) {
  const Json j = io::parse_json(R"({"m":15,"h":4,"S":[1,6,10],"vectors":[[0,0,-12,-9]]})");
  const mvfam::MatchingFamily f = io::family_from_json(j);
  EXPECT_EQ(f.vectors[0], zmod::ZVector(15, {0, 0, 3, 6}));
}

TEST(Family, Malformed) {
  const char* bad[] = {
      R"({"h":2,"S":[1],"vectors":[]})",                    // no m
      R"({"m":1,"h":2,"S":[1],"vectors":[]})",              // m too small
      R"({"m":15,"h":0,"S":[1],"vectors":[]})",             // h = 0
      R"({"m":15,"h":2,"S":[0],"vectors":[]})",             // 0 in S
      R"({"m":15,"h":2,"S":[15],"vectors":[]})",            // out of range
      R"({"m":15,"h":2,"S":[1],"vectors":[[1,2,3]]})",      // length
      R"({"m":15,"h":2,"S":[1],"vectors":"nope"})",         // type
      R"([1,2,3])",
  };
  for (const char* text : bad) {
    EXPECT_THROW(io::family_from_json(io::parse_json(text)), Error) << text;
  }
  EXPECT_THROW(io::parse_json("{\"m\": "), Error);
}

TEST(Polynomial, AssetRoundTrip) {
  const auto p = io::polynomial_from_json(io::parse_json(io::read_file(MVLDC_ASSETS "/p511.json")));
  EXPECT_EQ(p, decpoly::known_511_polynomial());
  const Json j = io::to_json(p);
  EXPECT_EQ(j["gamma_minpoly"], "211");
  EXPECT_EQ(j["terms"][1]["coef"], "14a");
  EXPECT_EQ(j["terms"][2]["exp"], 65);
  EXPECT_EQ(io::polynomial_from_json(io::parse_json(j.dump())), p);
}

TEST(Polynomial, CanonicalizesOnRead) {
  // unsorted, duplicated and zero terms collapse on input
  const Json j = io::parse_json(
      R"({"m":3,"t1":2,"gamma_minpoly":"7",
          "terms":[{"coef":"1","exp":1},{"coef":"0","exp":2},{"coef":"1","exp":0},
                   {"coef":"2","exp":1},{"coef":"2","exp":1}]})");
  const auto p = io::polynomial_from_json(j);
  ASSERT_EQ(p.k(), 2u);
  EXPECT_EQ(p.terms[0].exp, 0u);
  EXPECT_EQ(p.terms[1].exp, 1u);
  EXPECT_EQ(p.terms[1].coef, 1u);
}

TEST(Polynomial, Malformed) {
  const char* bad[] = {
      R"({"m":511,"t1":8,"gamma_minpoly":"211","terms":[]})",               // t1 mismatch
      R"({"m":511,"t1":9,"gamma_minpoly":"201","terms":[]})",               // reducible
      R"({"m":511,"t1":9,"gamma_minpoly":"211","terms":[{"coef":"200","exp":0}]})",
      R"({"m":511,"t1":9,"gamma_minpoly":"211","terms":[{"coef":"zz","exp":0}]})",
      R"({"m":511,"t1":9,"gamma_minpoly":"211","terms":[{"coef":"1","exp":511}]})",
      R"({"m":511,"t1":9,"gamma_minpoly":"211"})",
      R"({"m":512,"t1":9,"gamma_minpoly":"211","terms":[]})",               // even m
  };
  for (const char* text : bad) {
    EXPECT_THROW(io::polynomial_from_json(io::parse_json(text)), Error) << text;
  }
}

TEST(Plan, Fields) {
  const auto p1 = decpoly::known_511_polynomial();
  const auto p2 = compose::canonical_for_modulus(zmod::factorize(3));
  const compose::CompositionPlan pl = compose::plan(p1, p2);
  const Json j = io::plan_to_json(pl);
  EXPECT_EQ(j["m1"], 511);
  EXPECT_EQ(j["m2"], 3);
  EXPECT_EQ(j["t"], 18);
  EXPECT_EQ(j["h1"], pl.h1);
  EXPECT_EQ(gf2::parse_hex(j["gamma_minpoly_big"].get<std::string>()), pl.gamma_minpoly());
}

TEST(Codeword, RoundTrip) {
  const zmod::Modulus mod = zmod::factorize(15);
  decpoly::DecodingPolynomial p = compose::canonical_for_modulus(mod);
  decpoly::HomeContext ctx = decpoly::home_context(p);
  const gf2::Poly fmod = ctx.field.modulus();
  ldc::Code code(std::move(ctx.field), ctx.gamma, family15(), std::move(p));
  const ldc::Codeword w = code.encode(std::vector<gf2::Elem>{{1}, {0xf}, {0x6}});
  const std::string text = io::codeword_to_string(w);
  EXPECT_TRUE(text.starts_with("mvldc m=15 h=4 t=4\n"));
  std::istringstream in(text);
  EXPECT_EQ(io::read_codeword(in, fmod), w);

  std::istringstream wrong_field(text);
  EXPECT_THROW(io::read_codeword(wrong_field, 0x211), Error);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(io::read_codeword(truncated, fmod), Error);
  std::istringstream wide("mvldc m=3 h=1 t=4\n1\n2\n1f\n");
  EXPECT_THROW(io::read_codeword(wide, fmod), Error);
  std::istringstream header("ldc m=3 h=1 t=4\n1\n2\n3\n");
  EXPECT_THROW(io::read_codeword(header, fmod), Error);
  std::istringstream numbers("mvldc m=x h=1 t=4\n");
  EXPECT_THROW(io::read_codeword(numbers, fmod), Error);
  std::istringstream empty("");
  EXPECT_THROW(io::read_codeword(empty, fmod), Error);
}

TEST(Transcript, OneBasedIndices) {
  pir::Transcript tr;
  tr.i = 0;
  tr.queries = {{0, 17, gf2::Elem{0xa}}, {1, 3, gf2::Elem{0}}};
  tr.bits_up = 32;
  tr.bits_down = 8;
  const Json j = io::to_json(tr);
  EXPECT_EQ(j.dump(),
            R"({"i":1,"queries":[{"server":1,"pos":17,"answer":"a"},)"
            R"({"server":2,"pos":3,"answer":"0"}],"bits_up":32,"bits_down":8})");
}

TEST(Hunt, EntriesAndCheckpoint) {
  decpoly::SearchLimits lim;
  const decpoly::HuntEntry a = decpoly::hunt_one(15, 3, lim);
  const decpoly::HuntEntry b = decpoly::hunt_one(511, 3, lim);
  const Json ja = io::to_json(a), jb = io::to_json(b);
  EXPECT_EQ(ja["verdict"], "nonexistent");
  EXPECT_FALSE(ja.contains("poly"));
  EXPECT_EQ(ja["certificate"]["supports"], 106);
  EXPECT_EQ(jb["verdict"], "found");
  EXPECT_EQ(jb["k"], 3);
  EXPECT_EQ(io::polynomial_from_json(jb["poly"]), *b.poly);

  std::istringstream log(ja.dump() + "\n\n" + jb.dump() + "\n");
  EXPECT_EQ(io::checkpointed_moduli(log), (std::vector<std::uint64_t>{15, 511}));
  std::istringstream broken(ja.dump() + "\n{\"m\":");
  EXPECT_THROW(io::checkpointed_moduli(broken), Error);
}
