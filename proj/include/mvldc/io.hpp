#pragma once

// File formats. JSON objects keep the documented field order.
//
//   family      {"m", "h", "S", "vectors"}
//   polynomial  {"m", "t1", "gamma_minpoly", "terms": [{"coef", "exp"}]}
//   plan        {"m1", "m2", "t", "h1", "h2", "gamma_minpoly_big"}
//   transcript  {"i", "queries": [{"server", "pos", "answer"}], "bits_up", "bits_down"}
//   codeword    text: "mvldc m=<m> h=<h> t=<t>" then N hex symbols, one per line
//
// Hex values are bit-vectors with the least significant bit as the constant
// term. Indices i and servers are 1-based in files.

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvldc/compose.hpp"
#include "mvldc/decpoly.hpp"
#include "mvldc/error.hpp"
#include "mvldc/gf2.hpp"
#include "mvldc/ldc.hpp"
#include "mvldc/mvfam.hpp"
#include "mvldc/pir.hpp"

namespace mvldc::io {

using Json = nlohmann::ordered_json;

namespace detail {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::kInvalidArgument, std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kInvalidArgument, std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace detail

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kInvalidArgument, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kInvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kInvalidArgument, "cannot write " + path);
  out << text;
}

// ---- matching families ----

inline Json to_json(const mvfam::MatchingFamily& fam) {
  Json j;
  j["m"] = fam.m;
  j["h"] = fam.h;
  j["S"] = fam.target;
  Json vecs = Json::array();
  for (const auto& v : fam.vectors) {
    vecs.push_back(std::vector<zmod::Residue>(v.coords().begin(), v.coords().end()));
  }
  j["vectors"] = std::move(vecs);
  return j;
}

inline mvfam::MatchingFamily family_from_json(const Json& j) {
  mvfam::MatchingFamily fam;
  const auto m = detail::get<std::uint64_t>(j, "m");
  require(m >= 2 && m <= zmod::kMaxModulus, "family: m out of range");
  fam.m = static_cast<std::uint32_t>(m);
  fam.h = detail::get<std::size_t>(j, "h");
  require(fam.h >= 1, "family: h must be >= 1");
  fam.target = mvfam::normalize_target(fam.m, detail::get<std::vector<zmod::Residue>>(j, "S"));
  for (const auto& row : detail::get<std::vector<std::vector<std::int64_t>>>(j, "vectors")) {
    require(row.size() == fam.h, "family: vector length differs from h");
    fam.vectors.push_back(zmod::ZVector::from_signed(fam.m, row));
  }
  return fam;
}

// ---- decoding polynomials ----

inline Json to_json(const decpoly::DecodingPolynomial& p) {
  Json j;
  j["m"] = p.m();
  j["t1"] = p.t1();
  j["gamma_minpoly"] = gf2::to_hex(p.gamma_minpoly);
  Json terms = Json::array();
  for (const auto& t : p.terms) {
    Json term;
    term["coef"] = gf2::to_hex(t.coef);
    term["exp"] = t.exp;
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

inline decpoly::DecodingPolynomial polynomial_from_json(const Json& j) {
  const zmod::Modulus mod = zmod::factorize(detail::get<std::uint64_t>(j, "m"));
  const gf2::Poly minpoly = gf2::parse_hex(detail::get<std::string>(j, "gamma_minpoly"));
  const auto t1 = detail::get<unsigned>(j, "t1");
  require(gf2::degree(minpoly) == static_cast<int>(t1),
          "polynomial: t1 does not match the degree of gamma_minpoly");
  require(gf2::is_irreducible(minpoly), "polynomial: gamma_minpoly is reducible");
  if (!j.contains("terms") || !j["terms"].is_array()) {
    fail(ErrorKind::kInvalidArgument, "polynomial: missing \"terms\" array");
  }
  std::vector<decpoly::Term> terms;
  for (const Json& term : j["terms"]) {
    decpoly::Term t;
    t.coef = gf2::parse_hex(detail::get<std::string>(term, "coef"));
    require(gf2::degree(t.coef) < static_cast<int>(t1), "polynomial: coefficient wider than t1");
    t.exp = detail::get<zmod::Residue>(term, "exp");
    require(t.exp < mod.value(), "polynomial: exponent " + std::to_string(t.exp) + " not below m");
    terms.push_back(t);
  }
  return decpoly::canonicalize(mod, minpoly, terms);
}

// ---- composition plans ----

inline Json plan_to_json(const compose::CompositionPlan& pl) {
  Json j;
  j["m1"] = pl.m1.value();
  j["m2"] = pl.m2.value();
  j["t"] = pl.t();
  j["h1"] = pl.h1;
  j["h2"] = pl.h2;
  j["gamma_minpoly_big"] = gf2::to_hex(pl.gamma_minpoly());
  return j;
}

// ---- PIR transcripts ----

inline Json to_json(const pir::Transcript& tr) {
  Json j;
  j["i"] = tr.i + 1;
  Json qs = Json::array();
  for (const auto& q : tr.queries) {
    Json e;
    e["server"] = q.server + 1;
    e["pos"] = q.position;
    e["answer"] = gf2::to_hex(q.answer.bits);
    qs.push_back(std::move(e));
  }
  j["queries"] = std::move(qs);
  j["bits_up"] = tr.bits_up;
  j["bits_down"] = tr.bits_down;
  return j;
}

// ---- codewords ----

inline void write_codeword(std::ostream& out, const ldc::Codeword& w) {
  out << "mvldc m=" << w.m << " h=" << w.h << " t=" << w.t << '\n';
  for (const gf2::Elem& e : w.symbols) out << gf2::to_hex(e.bits) << '\n';
}

inline std::string codeword_to_string(const ldc::Codeword& w) {
  std::ostringstream ss;
  write_codeword(ss, w);
  return ss.str();
}

/// The field modulus is not part of the text format; the caller supplies it.
inline ldc::Codeword read_codeword(std::istream& in, gf2::Poly field_modulus) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorKind::kInvalidArgument, "codeword: empty input");
  std::istringstream hs(header);
  std::string magic, fm, fh, ft;
  hs >> magic >> fm >> fh >> ft;
  if (magic != "mvldc" || !fm.starts_with("m=") || !fh.starts_with("h=") ||
      !ft.starts_with("t=")) {
    fail(ErrorKind::kInvalidArgument, "codeword: bad header '" + header + "'");
  }
  ldc::Codeword w;
  try {
    w.m = static_cast<std::uint32_t>(std::stoul(fm.substr(2)));
    w.h = std::stoul(fh.substr(2));
    w.t = static_cast<unsigned>(std::stoul(ft.substr(2)));
  } catch (const std::exception&) {
    fail(ErrorKind::kInvalidArgument, "codeword: bad header '" + header + "'");
  }
  require(gf2::degree(field_modulus) == static_cast<int>(w.t),
          "codeword: t does not match the field");
  w.field_modulus = field_modulus;
  std::uint64_t n_len = 1;
  for (std::size_t j = 0; j < w.h; ++j) {
    n_len *= w.m;
    require(n_len <= ldc::kMaxCodeLength, "codeword: length too large");
  }
  w.symbols.reserve(n_len);
  const std::uint64_t limit = (std::uint64_t{1} << w.t) - 1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::uint64_t v = gf2::parse_hex(line);
    require(v <= limit, "codeword: symbol 0x" + line + " exceeds t bits");
    w.symbols.push_back(gf2::Elem{v});
  }
  require(w.symbols.size() == n_len, "codeword: expected " + std::to_string(n_len) +
                                         " symbols, found " + std::to_string(w.symbols.size()));
  return w;
}

// ---- hunt ----

inline Json to_json(const decpoly::HuntEntry& e) {
  Json j;
  j["m"] = e.m;
  j["verdict"] = std::string(decpoly::to_string(e.verdict));
  if (e.poly) {
    j["k"] = e.poly->k();
    j["poly"] = to_json(*e.poly);
  }
  if (e.verdict == decpoly::HuntVerdict::kFound ||
      e.verdict == decpoly::HuntVerdict::kNonexistent) {
    Json c;
    c["m"] = e.certificate.m;
    c["t"] = e.certificate.t;
    c["max_k"] = e.certificate.max_k;
    c["supports"] = e.certificate.supports;
    c["evaluations"] = e.certificate.evaluations;
    j["certificate"] = std::move(c);
  }
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

/// (m, verdict) pairs recorded in a JSON-lines checkpoint, in file order.
inline std::vector<std::pair<std::uint64_t, std::string>> checkpointed_verdicts(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = parse_json(line);
    out.emplace_back(detail::get<std::uint64_t>(j, "m"), detail::get<std::string>(j, "verdict"));
  }
  return out;
}

inline std::vector<std::uint64_t> checkpointed_moduli(std::istream& in) {
  std::vector<std::uint64_t> out;
  for (const auto& [m, verdict] : checkpointed_verdicts(in)) out.push_back(m);
  return out;
}

}  // namespace mvldc::io
