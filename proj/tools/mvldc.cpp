// mvldc: command-line front end for the mvldc library.
//
// Exit codes: 0 found/verified, 2 nonexistent/exhausted, 1 error.
// Errors are printed to stderr as {"error": kind, "message": text}.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mvldc/compose.hpp"
#include "mvldc/decpoly.hpp"
#include "mvldc/gf2.hpp"
#include "mvldc/io.hpp"
#include "mvldc/ldc.hpp"
#include "mvldc/mvfam.hpp"
#include "mvldc/pir.hpp"
#include "mvldc/zmod.hpp"

using namespace mvldc;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNone = 2;

struct Common {
  std::string format = "text";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool json() const { return format == "json"; }
};

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    std::size_t used = 0;
    const std::uint64_t out = std::stoull(v, &used, 0);
    if (used == std::string(v).size()) return out;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::kInvalidArgument, std::string("environment variable ") + name +
                                        " is not an unsigned integer");
}

void emit(const Common& c, const Json& j, const std::string& text) {
  if (c.json()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

std::string join(std::span<const zmod::Residue> xs) {
  std::string out = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out + "}";
}

std::string describe_poly(const decpoly::DecodingPolynomial& p) {
  std::ostringstream ss;
  ss << "m=" << p.m() << " t1=" << p.t1() << " gamma_minpoly=0x" << gf2::to_hex(p.gamma_minpoly)
     << " k=" << p.k() << '\n';
  for (const auto& t : p.terms) ss << "  0x" << gf2::to_hex(t.coef) << " * x^" << t.exp << '\n';
  return ss.str();
}

decpoly::DecodingPolynomial load_poly(const std::string& path) {
  return io::polynomial_from_json(io::parse_json(io::read_file(path)));
}

mvfam::MatchingFamily load_family(const std::string& path) {
  return io::family_from_json(io::parse_json(io::read_file(path)));
}

ldc::Code load_code(const std::string& family_path, const std::string& poly_path) {
  decpoly::DecodingPolynomial p = load_poly(poly_path);
  decpoly::HomeContext ctx = decpoly::home_context(p);
  return ldc::Code(std::move(ctx.field), ctx.gamma, load_family(family_path), std::move(p));
}

std::vector<gf2::Elem> load_message(const std::string& path, const ldc::Code& code) {
  std::istringstream in(io::read_file(path));
  std::vector<gf2::Elem> x;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const gf2::Elem e{gf2::parse_hex(line)};
    require(code.field().contains(e), "message symbol 0x" + line + " exceeds the field");
    x.push_back(e);
  }
  require(x.size() == code.n(), "message has " + std::to_string(x.size()) +
                                    " symbols, the family has n = " + std::to_string(code.n()));
  return x;
}

std::vector<gf2::Elem> random_message(const ldc::Code& code, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> d(0, code.field().group_order());
  std::vector<gf2::Elem> x(code.n());
  for (auto& e : x) e.bits = d(rng);
  return x;
}

ldc::Codeword load_word(const std::string& path, const ldc::Code& code) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kInvalidArgument, "cannot open " + path);
  ldc::Codeword w = io::read_codeword(in, code.field().modulus());
  code.check_symbols(w);
  return w;
}

std::size_t to_index(std::size_t one_based, std::size_t n) {
  require(one_based >= 1 && one_based <= n,
          "index must be in [1, " + std::to_string(n) + "], got " + std::to_string(one_based));
  return one_based - 1;
}

// ---- subcommands ----

int cmd_field_info(const Common& c, std::uint64_t m) {
  const zmod::Modulus mod = zmod::factorize(m);
  const unsigned t = gf2::mult_order_of_2(mod);
  require(t <= gf2::kMaxDegree, "field degree " + std::to_string(t) + " exceeds 40");
  const gf2::Field f(t);
  const gf2::OrderMElement g = gf2::find_order_m_element(f, m);
  Json j;
  j["m"] = m;
  j["t"] = t;
  j["modulus"] = gf2::to_hex(f.modulus());
  j["gamma"] = gf2::to_hex(g.element.bits);
  j["gamma_minpoly"] = gf2::to_hex(f.minimal_polynomial(g.element));
  std::ostringstream ss;
  ss << "m=" << m << " t=" << t << " modulus=0x" << gf2::to_hex(f.modulus())
     << " gamma=0x" << gf2::to_hex(g.element.bits) << " gamma_minpoly=0x"
     << gf2::to_hex(f.minimal_polynomial(g.element)) << '\n';
  emit(c, j, ss.str());
  return kOk;
}

int cmd_canonical_set(const Common& c, std::uint64_t m) {
  const zmod::Modulus mod = zmod::factorize(m);
  const zmod::CanonicalSet s = zmod::canonical_set(mod);
  Json j;
  j["m"] = m;
  Json fac = Json::array();
  for (const auto& pp : mod.factors()) fac.push_back({pp.prime, pp.exponent});
  j["factors"] = fac;
  j["S"] = s.sorted();
  emit(c, j, "S_" + std::to_string(m) + " = " + join(s.sorted()) + '\n');
  return kOk;
}

int cmd_find_poly(const Common& c, std::uint64_t m, unsigned max_k, bool force,
                  const std::string& out) {
  decpoly::SearchLimits lim;
  lim.ceiling = env_u64("MVLDC_SEARCH_CEILING", lim.ceiling);
  lim.force = force;
  lim.threads = c.threads;
  const decpoly::HuntEntry e = decpoly::hunt_one(m, max_k, lim);
  if (e.verdict == decpoly::HuntVerdict::kError) fail(ErrorKind::kInvalidArgument, e.detail);
  if (e.verdict == decpoly::HuntVerdict::kRefused) fail(ErrorKind::kLimitExceeded, e.detail);
  if (e.poly && !out.empty()) io::write_file(out, io::to_json(*e.poly).dump(2) + '\n');
  std::ostringstream ss;
  if (e.poly) {
    ss << "found " << e.poly->k() << "-monomial S_" << m << "-decoding polynomial\n"
       << describe_poly(*e.poly);
  } else {
    ss << "nonexistent: no S_" << m << "-decoding polynomial with <= " << max_k
       << " monomials\n";
  }
  ss << "certificate: m=" << e.certificate.m << " t=" << e.certificate.t
     << " max_k=" << e.certificate.max_k << " supports=" << e.certificate.supports << '\n';
  emit(c, io::to_json(e), ss.str());
  return e.poly ? kOk : kNone;
}

int cmd_canonical_poly(const Common& c, std::uint64_t m, const std::string& out) {
  const decpoly::DecodingPolynomial p = compose::canonical_for_modulus(zmod::factorize(m));
  if (!out.empty()) io::write_file(out, io::to_json(p).dump(2) + '\n');
  emit(c, io::to_json(p), describe_poly(p));
  return kOk;
}

int cmd_verify_poly(const Common& c, const std::string& file) {
  const decpoly::DecodingPolynomial p = load_poly(file);
  const decpoly::HomeContext ctx = decpoly::home_context(p);
  const zmod::CanonicalSet s = zmod::canonical_set(p.mod);
  const decpoly::DecodingCheck chk =
      decpoly::verify_decoding(p, s.elements(), ctx.field, ctx.gamma);
  Json j;
  j["m"] = p.m();
  j["k"] = p.k();
  j["S"] = s.sorted();
  j["valid"] = chk.valid;
  if (!chk.valid) {
    j["point"] = chk.point;
    j["value"] = gf2::to_hex(chk.value.bits);
  }
  emit(c, j, (chk.valid ? "valid" : "invalid: " + chk.describe()) + std::string("\n"));
  return chk.valid ? kOk : kError;
}

int cmd_compose(const Common& c, const std::string& f1, const std::string& f2,
                const std::string& out, const std::string& plan_out) {
  const decpoly::DecodingPolynomial p1 = load_poly(f1);
  const decpoly::DecodingPolynomial p2 = load_poly(f2);
  const compose::CompositionPlan pl = compose::plan(p1, p2);
  const decpoly::DecodingPolynomial p = compose::compose_polynomials(pl, p1, p2);
  if (!out.empty()) io::write_file(out, io::to_json(p).dump(2) + '\n');
  if (!plan_out.empty()) io::write_file(plan_out, io::plan_to_json(pl).dump(2) + '\n');
  Json j;
  j["polynomial"] = io::to_json(p);
  j["plan"] = io::plan_to_json(pl);
  std::ostringstream ss;
  ss << "plan: m1=" << pl.m1.value() << " m2=" << pl.m2.value() << " t=" << pl.t()
     << " h1=" << pl.h1 << " h2=" << pl.h2 << '\n'
     << describe_poly(p);
  emit(c, j, ss.str());
  return kOk;
}

int cmd_search_mv(const Common& c, std::uint64_t m, std::size_t h, std::size_t n,
                  std::uint64_t seed, std::uint64_t budget, const std::string& out) {
  mvfam::SearchOptions opt;
  opt.seed = seed;
  opt.node_budget = budget ? budget : env_u64("MVLDC_NODE_BUDGET", opt.node_budget);
  opt.threads = c.threads;
  const mvfam::FamilySearchResult r = mvfam::search_family(zmod::factorize(m), h, n, opt);
  Json j;
  j["status"] = std::string(mvfam::to_string(r.status));
  j["nodes"] = r.nodes;
  std::ostringstream ss;
  ss << mvfam::to_string(r.status) << " (" << r.nodes << " nodes)\n";
  if (r.family) {
    j["family"] = io::to_json(*r.family);
    for (const auto& v : r.family->vectors) {
      ss << " ";
      for (zmod::Residue x : v.coords()) ss << ' ' << x;
      ss << '\n';
    }
    if (!out.empty()) io::write_file(out, io::to_json(*r.family).dump(2) + '\n');
  }
  emit(c, j, ss.str());
  if (r.status == mvfam::SearchStatus::kFound) return kOk;
  return r.status == mvfam::SearchStatus::kExhausted ? kNone : kError;
}

int cmd_encode(const Common& c, const std::string& fam, const std::string& poly,
               const std::string& msg, std::uint64_t seed, const std::string& out) {
  const ldc::Code code = load_code(fam, poly);
  const std::vector<gf2::Elem> x =
      msg.empty() ? random_message(code, seed) : load_message(msg, code);
  const ldc::Codeword w = code.encode(x);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) fail(ErrorKind::kInvalidArgument, "cannot write " + out);
    io::write_codeword(f, w);
  } else if (!c.json()) {
    io::write_codeword(std::cout, w);
    return kOk;
  }
  Json j;
  j["m"] = w.m;
  j["h"] = w.h;
  j["t"] = w.t;
  j["length"] = w.size();
  Json xs = Json::array();
  for (const auto& e : x) xs.push_back(gf2::to_hex(e.bits));
  j["message"] = xs;
  if (!out.empty()) j["out"] = out;
  emit(c, j, "wrote " + std::to_string(w.size()) + " symbols to " + out + '\n');
  return kOk;
}

int cmd_decode(const Common& c, const std::string& fam, const std::string& poly,
               const std::string& word, std::size_t index, std::uint64_t seed) {
  const ldc::Code code = load_code(fam, poly);
  const ldc::Codeword w = load_word(word, code);
  const std::size_t i = to_index(index, code.n());
  std::mt19937_64 rng(seed);
  const zmod::ZVector v = code.random_point(rng);
  const ldc::DecoderQuery q = code.decode_queries(i, v);
  const gf2::Elem got = code.decode_at(i, w, v);
  Json j;
  j["i"] = index;
  j["value"] = gf2::to_hex(got.bits);
  j["queries"] = q.indices;
  emit(c, j, "x_" + std::to_string(index) + " = 0x" + gf2::to_hex(got.bits) + '\n');
  return kOk;
}

int cmd_corrupt(const Common& c, const std::string& fam, const std::string& poly,
                const std::string& word, double delta, std::uint64_t seed, bool adversarial,
                const std::string& positions, const std::string& out) {
  const ldc::Code code = load_code(fam, poly);
  const ldc::Codeword w = load_word(word, code);
  ldc::TrialConfig cfg;
  cfg.delta = delta;
  cfg.seed = seed;
  if (adversarial) {
    cfg.mode = ldc::CorruptionMode::kAdversarial;
    if (positions.empty()) {
      cfg.positions = ldc::block_pattern(delta, w.size());
    } else {
      std::istringstream in(io::read_file(positions));
      std::uint64_t p = 0;
      while (in >> p) cfg.positions.push_back(p);
      require(in.eof(), "positions file must contain unsigned integers");
    }
  }
  std::mt19937_64 rng(seed);
  const ldc::Codeword noisy = ldc::corrupt(w, cfg, rng);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) fail(ErrorKind::kInvalidArgument, "cannot write " + out);
    io::write_codeword(f, noisy);
  } else if (!c.json()) {
    io::write_codeword(std::cout, noisy);
    return kOk;
  }
  Json j;
  j["corrupted"] = ldc::hamming_distance(w, noisy);
  j["budget"] = ldc::corruption_budget(delta, w.size());
  if (!out.empty()) j["out"] = out;
  emit(c, j, "corrupted " + std::to_string(ldc::hamming_distance(w, noisy)) + " of " +
                 std::to_string(w.size()) + " symbols\n");
  return kOk;
}

int cmd_trials(const Common& c, const std::string& fam, const std::string& poly,
               const std::string& msg, std::size_t index, double delta, std::uint64_t trials,
               std::uint64_t seed, bool adversarial) {
  const ldc::Code code = load_code(fam, poly);
  const std::vector<gf2::Elem> x =
      msg.empty() ? random_message(code, seed) : load_message(msg, code);
  ldc::TrialConfig cfg;
  cfg.delta = delta;
  cfg.trials = trials;
  cfg.seed = seed;
  if (adversarial) {
    cfg.mode = ldc::CorruptionMode::kAdversarial;
    cfg.positions = ldc::block_pattern(delta, code.length());
  }
  const ldc::TrialReport r = ldc::run_trials(code, x, to_index(index, code.n()), cfg);
  Json j;
  j["k"] = code.k();
  j["length"] = code.length();
  j["delta"] = delta;
  j["corrupted"] = r.corrupted;
  j["trials"] = r.trials;
  j["failures"] = r.failures;
  j["rate"] = r.rate;
  j["std_error"] = r.std_error;
  j["wilson"] = {r.wilson_low, r.wilson_high};
  j["bound"] = r.bound;
  std::ostringstream ss;
  ss << "failures " << r.failures << "/" << r.trials << " rate=" << r.rate << " (se "
     << r.std_error << ", 95% [" << r.wilson_low << ", " << r.wilson_high << "]) bound k*delta="
     << r.bound << '\n';
  emit(c, j, ss.str());
  return kOk;
}

int cmd_pir_demo(const Common& c, std::uint64_t m, std::size_t h, std::size_t index,
                 std::uint64_t seed, const std::string& poly_path, const std::string& fam_path,
                 std::size_t n) {
  decpoly::DecodingPolynomial p = poly_path.empty()
                                      ? compose::canonical_for_modulus(zmod::factorize(m))
                                      : load_poly(poly_path);
  require(p.m() == m, "polynomial modulus differs from --m");
  mvfam::MatchingFamily fam;
  if (fam_path.empty()) {
    mvfam::SearchOptions opt;
    opt.seed = seed;
    opt.node_budget = env_u64("MVLDC_NODE_BUDGET", opt.node_budget);
    opt.threads = c.threads;
    auto r = mvfam::search_family(p.mod, h, n, opt);
    if (!r.family) {
      fail(ErrorKind::kLimitExceeded, "no matching family of size " + std::to_string(n) +
                                          " found (" + std::string(mvfam::to_string(r.status)) +
                                          ")");
    }
    fam = std::move(*r.family);
  } else {
    fam = load_family(fam_path);
    require(fam.h == h, "family dimension differs from --h");
  }
  decpoly::HomeContext ctx = decpoly::home_context(p);
  ldc::Code code(std::move(ctx.field), ctx.gamma, std::move(fam), std::move(p));
  const std::size_t i = to_index(index, code.n());
  std::vector<gf2::Elem> db = random_message(code, seed);
  pir::PirInstance inst(std::move(code), std::move(db));
  std::mt19937_64 rng(seed);
  const auto [value, tr] = pir::retrieve(inst, i, rng);
  const pir::CommunicationReport comm = inst.communication();
  const bool enumerable = inst.code().length() <= ldc::kMaxExactLength;
  const bool exact = enumerable && pir::verify_retrieval_exact(inst, i);

  Json j;
  j["transcript"] = io::to_json(tr);
  j["value"] = gf2::to_hex(value.bits);
  j["expected"] = gf2::to_hex(inst.database()[i].bits);
  Json cm;
  cm["k"] = comm.k;
  cm["position_bits"] = comm.position_bits;
  cm["bits_up"] = comm.bits_up;
  cm["bits_down"] = comm.bits_down;
  cm["total"] = comm.total;
  cm["database_bits"] = comm.database_bits;
  j["communication"] = cm;
  if (enumerable) j["retrieval_exact"] = exact;
  Json priv = Json::array();
  bool uniform = true;
  for (std::size_t s = 0; s < inst.k(); ++s) {
    const pir::PrivacyCertificate pc = pir::verify_privacy(inst, i, s, seed);
    uniform = uniform && pc.uniform;
    Json e;
    e["server"] = s + 1;
    e["exact"] = pc.exact;
    e["uniform"] = pc.uniform;
    e["min_count"] = pc.min_count;
    e["max_count"] = pc.max_count;
    if (!pc.exact) e["chi_square"] = pc.chi_square;
    priv.push_back(e);
  }
  j["privacy"] = priv;

  std::ostringstream ss;
  ss << "retrieved x_" << index << " = 0x" << gf2::to_hex(value.bits) << " (expected 0x"
     << gf2::to_hex(inst.database()[i].bits) << ")\n";
  for (const auto& q : tr.queries) {
    ss << "  server " << q.server + 1 << " <- pos " << q.position << " -> 0x"
       << gf2::to_hex(q.answer.bits) << '\n';
  }
  ss << "bits up " << comm.bits_up << ", down " << comm.bits_down << ", total " << comm.total
     << " (database " << comm.database_bits << " bits)\n";
  if (enumerable) ss << "retrieval over all v: " << (exact ? "exact" : "FAILED") << '\n';
  ss << "per-server query distribution: " << (uniform ? "uniform" : "NOT uniform") << '\n';
  emit(c, j, ss.str());
  return value == inst.database()[i] && (!enumerable || exact) && uniform ? kOk : kError;
}

int cmd_hunt(const Common& c, const std::string& candidates, unsigned max_k, bool force,
             const std::string& checkpoint) {
  std::vector<std::uint64_t> ms;
  {
    std::istringstream in(io::read_file(candidates));
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      std::uint64_t m = 0;
      while (ls >> m) ms.push_back(m);
      require(ls.eof(), "candidates file must contain unsigned integers");
    }
  }
  std::map<std::uint64_t, std::string> done;
  if (!checkpoint.empty()) {
    std::ifstream in(checkpoint);
    if (in) {
      for (auto& [m, verdict] : io::checkpointed_verdicts(in)) done[m] = std::move(verdict);
    }
  }
  // earlier verdicts count toward the exit code; errors are retried
  bool any_found = false;
  std::vector<std::uint64_t> todo;
  for (std::uint64_t m : ms) {
    const auto it = done.find(m);
    if (it == done.end() || it->second == "error") {
      todo.push_back(m);
      continue;
    }
    any_found = any_found || it->second == "found";
    if (!c.json()) std::cout << "m=" << m << ' ' << it->second << " (checkpointed)\n";
  }
  std::ofstream ckpt;
  if (!checkpoint.empty()) {
    ckpt.open(checkpoint, std::ios::app);
    if (!ckpt) fail(ErrorKind::kInvalidArgument, "cannot write " + checkpoint);
  }
  decpoly::SearchLimits lim;
  lim.ceiling = env_u64("MVLDC_SEARCH_CEILING", lim.ceiling);
  lim.force = force;
  lim.threads = c.threads;
  bool any_error = false;
  Json all = Json::array();
  decpoly::hunt(todo, max_k, lim, [&](const decpoly::HuntEntry& e) {
    const Json j = io::to_json(e);
    if (ckpt.is_open()) ckpt << j.dump() << std::endl;
    any_found = any_found || e.verdict == decpoly::HuntVerdict::kFound;
    any_error = any_error || e.verdict == decpoly::HuntVerdict::kError;
    if (c.json()) {
      all.push_back(j);
    } else {
      std::cout << "m=" << e.m << ' ' << decpoly::to_string(e.verdict);
      if (e.poly) std::cout << " k=" << e.poly->k();
      if (!e.detail.empty()) std::cout << " (" << e.detail << ')';
      std::cout << '\n';
    }
  });
  if (c.json()) {
    Json j;
    j["skipped"] = ms.size() - todo.size();
    j["results"] = all;
    std::cout << j.dump(2) << '\n';
  }
  if (any_error) return kError;
  return any_found ? kOk : kNone;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matching-vector locally decodable codes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_flag("--help", "print help and exit");
  Common c;
  app.add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads for search commands")
      ->check(CLI::Range(1u, 1024u));

  std::uint64_t m = 0, seed = 0, budget = 0, trials = 100000;
  std::size_t h = 0, n = 2, index = 1;
  unsigned max_k = 3;
  bool force = false, adversarial = false;
  double delta = 0.05;
  std::string file, p1, p2, out, plan_out, fam, poly, msg, word, positions, candidates,
      checkpoint;

  auto* fi = app.add_subcommand("field-info", "field GF(2^t) and an order-m gamma");
  fi->add_option("--m", m)->required();
  auto* cs = app.add_subcommand("canonical-set", "the canonical set S_m");
  cs->add_option("--m", m)->required();
  auto* fp = app.add_subcommand("find-poly", "exhaustive minimal S_m-decoding polynomial search");
  fp->add_option("--m", m)->required();
  fp->add_option("--max-k", max_k)->check(CLI::Range(1u, decpoly::kMaxSearchMonomials));
  fp->add_flag("--force", force, "run even above the search ceiling");
  fp->add_option("--out", out);
  auto* cp = app.add_subcommand("canonical-poly", "product-of-roots S_m-decoding polynomial");
  cp->add_option("--m", m)->required();
  cp->add_option("--out", out);
  auto* vp = app.add_subcommand("verify-poly", "check a polynomial file against S_m");
  vp->add_option("--file", file)->required();
  auto* co = app.add_subcommand("compose", "compose polynomials over coprime moduli");
  co->add_option("--p1", p1)->required();
  co->add_option("--p2", p2)->required();
  co->add_option("--out", out);
  co->add_option("--plan-out", plan_out);
  auto* sm = app.add_subcommand("search-mv", "search an S_m-matching family");
  sm->set_help_flag("--help", "print help and exit");
  sm->add_option("--m", m)->required();
  sm->add_option("--h", h)->required();
  sm->add_option("--n", n)->required();
  sm->add_option("--seed", seed);
  sm->add_option("--budget", budget, "node budget (0: default)");
  sm->add_option("--out", out);
  auto* en = app.add_subcommand("encode", "encode a message file");
  auto* de = app.add_subcommand("decode", "locally decode one symbol");
  auto* cr = app.add_subcommand("corrupt", "corrupt a codeword file");
  auto* tr = app.add_subcommand("trials", "Monte Carlo decoding under corruption");
  for (auto* s : {en, de, cr, tr}) {
    s->add_option("--family", fam)->required();
    s->add_option("--poly", poly)->required();
    s->add_option("--seed", seed);
  }
  en->add_option("--message", msg, "one hex symbol per line (default: random from seed)");
  en->add_option("--out", out);
  de->add_option("--word", word)->required();
  de->add_option("--index", index)->required();
  cr->add_option("--word", word)->required();
  cr->add_option("--delta", delta)->required();
  cr->add_flag("--adversarial", adversarial);
  cr->add_option("--positions", positions, "adversarial positions (default: first floor(delta*N))");
  cr->add_option("--out", out);
  tr->add_option("--message", msg);
  tr->add_option("--index", index);
  tr->add_option("--delta", delta);
  tr->add_option("--trials", trials);
  tr->add_flag("--adversarial", adversarial);
  auto* pd = app.add_subcommand("pir-demo", "k-server PIR retrieval");
  pd->set_help_flag("--help", "print help and exit");
  pd->add_option("--m", m)->required();
  pd->add_option("--h", h)->required();
  pd->add_option("--index", index)->required();
  pd->add_option("--seed", seed);
  pd->add_option("--poly", poly);
  pd->add_option("--family", fam);
  pd->add_option("--n", n);
  auto* hu = app.add_subcommand("hunt", "batch find-poly over candidate moduli");
  hu->add_option("--candidates", candidates)->required();
  hu->add_option("--max-k", max_k)->check(CLI::Range(1u, decpoly::kMaxSearchMonomials));
  hu->add_flag("--force", force);
  hu->add_option("--checkpoint", checkpoint, "JSON-lines file; finished moduli are skipped");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << Json{{"error", "invalid_argument"}, {"message", e.what()}}.dump() << '\n';
    return kError;
  }

  try {
    if (*fi) return cmd_field_info(c, m);
    if (*cs) return cmd_canonical_set(c, m);
    if (*fp) return cmd_find_poly(c, m, max_k, force, out);
    if (*cp) return cmd_canonical_poly(c, m, out);
    if (*vp) return cmd_verify_poly(c, file);
    if (*co) return cmd_compose(c, p1, p2, out, plan_out);
    if (*sm) return cmd_search_mv(c, m, h, n, seed, budget, out);
    if (*en) return cmd_encode(c, fam, poly, msg, seed, out);
    if (*de) return cmd_decode(c, fam, poly, word, index, seed);
    if (*cr) return cmd_corrupt(c, fam, poly, word, delta, seed, adversarial, positions, out);
    if (*tr) return cmd_trials(c, fam, poly, msg, index, delta, trials, seed, adversarial);
    if (*pd) return cmd_pir_demo(c, m, h, index, seed, poly, fam, n);
    if (*hu) return cmd_hunt(c, candidates, max_k, force, checkpoint);
  } catch (const Error& e) {
    std::cerr << Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump()
              << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return kError;
  }
  return kError;
}
