#pragma once

// S-decoding polynomials: sparse P(x) over GF(2^t) with P(1) = 1 and
// P(gamma^s) = 0 for every s in S, where gamma has order m.
//
// Coefficients are stored gamma-relative: a coefficient c is the bit-vector
// of its coordinates in the basis 1, gamma, ..., gamma^(t1-1), where t1 is the
// degree of gamma's minimal polynomial. A polynomial therefore carries over
// to any field that contains a root of that minimal polynomial.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mvldc/error.hpp"
#include "mvldc/gf2.hpp"
#include "mvldc/zmod.hpp"

namespace mvldc::decpoly {

using gf2::Elem;
using gf2::Poly;
using zmod::Residue;

struct Term {
  Poly coef = 0;  // gamma-relative
  Residue exp = 0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct DecodingPolynomial {
  zmod::Modulus mod;
  Poly gamma_minpoly = 0;
  std::vector<Term> terms;  // distinct exponents ascending, nonzero coefficients

  std::uint32_t m() const noexcept { return mod.value(); }
  unsigned t1() const noexcept { return static_cast<unsigned>(gf2::degree(gamma_minpoly)); }
  /// Number of monomials, i.e. the query count of the derived code.
  std::size_t k() const noexcept { return terms.size(); }

  friend bool operator==(const DecodingPolynomial& a, const DecodingPolynomial& b) {
    return a.mod.value() == b.mod.value() && a.gamma_minpoly == b.gamma_minpoly &&
           a.terms == b.terms;
  }
};

/// Reduces exponents mod m, merges equal exponents and drops zero coefficients.
inline DecodingPolynomial canonicalize(const zmod::Modulus& mod, Poly gamma_minpoly,
                                       std::span<const Term> terms) {
  std::map<Residue, Poly> merged;
  for (const Term& term : terms) merged[term.exp % mod.value()] ^= term.coef;
  DecodingPolynomial out{mod, gamma_minpoly, {}};
  for (const auto& [exp, coef] : merged) {
    if (coef != 0) out.terms.push_back({coef, exp});
  }
  if (out.terms.empty()) {
    fail(ErrorKind::kInvalidArgument, "polynomial is identically zero; P(1) = 1 is impossible");
  }
  return out;
}

/// P with coefficients instantiated in a concrete field at a concrete gamma.
class Instantiated {
 public:
  Instantiated(const DecodingPolynomial& p, const gf2::Field& field,
               const gf2::OrderMElement& gamma)
      : field_(field), m_(p.m()) {
    if (gamma.m != p.m()) {
      fail(ErrorKind::kInvalidArgument, "gamma has order " + std::to_string(gamma.m) +
                                            " but the polynomial is over m = " +
                                            std::to_string(p.m()));
    }
    if (field.eval(p.gamma_minpoly, gamma.element) != field.zero()) {
      fail(ErrorKind::kInvalidArgument, "gamma is not a root of 0x" + gf2::to_hex(p.gamma_minpoly));
    }
    const gf2::GammaBasis basis(field, gamma.element);
    powers_.resize(m_);
    Elem g = field.one();
    for (Residue e = 0; e < m_; ++e, g = field.mul(g, gamma.element)) powers_[e] = g;
    for (const Term& term : p.terms) {
      coefs_.push_back(basis.instantiate(term.coef));
      exps_.push_back(term.exp % m_);
    }
  }

  std::span<const Elem> coefs() const noexcept { return coefs_; }
  std::span<const Residue> exps() const noexcept { return exps_; }
  /// gamma^e for e in [0, m).
  std::span<const Elem> gamma_powers() const noexcept { return powers_; }

  /// P(gamma^s).
  Elem at_power(std::uint64_t s) const {
    Elem acc = field_.zero();
    for (std::size_t j = 0; j < coefs_.size(); ++j) {
      const Residue e = static_cast<Residue>(zmod::mulmod(s % m_, exps_[j], m_));
      acc = field_.add(acc, field_.mul(coefs_[j], powers_[e]));
    }
    return acc;
  }

 private:
  gf2::Field field_;
  std::uint32_t m_;
  std::vector<Elem> powers_;
  std::vector<Elem> coefs_;
  std::vector<Residue> exps_;
};

struct DecodingCheck {
  bool valid = true;
  std::uint64_t point = 0;  // first failing s (0 means P(1) != 1)
  Elem value{};

  std::string describe() const {
    if (valid) return "valid";
    if (point == 0) return "P(1) = 0x" + gf2::to_hex(value.bits) + " != 1";
    return "P(gamma^" + std::to_string(point) + ") = 0x" + gf2::to_hex(value.bits) + " != 0";
  }
};

inline DecodingCheck verify_decoding(const DecodingPolynomial& p, std::span<const Residue> s,
                                     const gf2::Field& field, const gf2::OrderMElement& gamma) {
  const Instantiated inst(p, field, gamma);
  if (Elem v = inst.at_power(0); v != field.one()) return {false, 0, v};
  for (Residue point : s) {
    if (Elem v = inst.at_power(point); v != field.zero()) return {false, point, v};
  }
  return {};
}

/// The field F_2[x]/(gamma_minpoly) with gamma = x: every polynomial can be
/// checked there without outside context.
struct HomeContext {
  gf2::Field field;
  gf2::OrderMElement gamma;
};

inline HomeContext home_context(const DecodingPolynomial& p) {
  gf2::Field field = gf2::Field::from_modulus(p.gamma_minpoly);
  const gf2::OrderMElement gamma = gf2::as_order_m(field, field.x(), p.m());
  return {std::move(field), gamma};
}

inline std::vector<Residue> normalize_points(std::uint32_t m, std::span<const Residue> s) {
  std::vector<Residue> out;
  for (Residue v : s) {
    if (v % m == 0) {
      fail(ErrorKind::kInvalidArgument, "S contains 0 (mod m); gamma^0 = 1 cannot be a zero");
    }
    out.push_back(v % m);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// prod_{s in S} (x - gamma^s), scaled so that P(1) = 1: degree |S|, at most
/// |S| + 1 monomials.
inline DecodingPolynomial canonical_polynomial(std::span<const Residue> s_in,
                                               const gf2::Field& field,
                                               const gf2::OrderMElement& gamma) {
  const zmod::Modulus mod = zmod::factorize(gamma.m);
  const std::vector<Residue> s = normalize_points(gamma.m, s_in);
  std::vector<Elem> q{field.one()};
  for (Residue point : s) {
    const Elem root = field.pow(gamma.element, point);
    std::vector<Elem> next(q.size() + 1, field.zero());
    for (std::size_t i = 0; i < q.size(); ++i) {
      next[i + 1] = field.add(next[i + 1], q[i]);
      next[i] = field.add(next[i], field.mul(q[i], root));
    }
    q = std::move(next);
  }
  Elem at_one = field.zero();
  for (Elem c : q) at_one = field.add(at_one, c);
  const Elem scale = field.inv(at_one);

  const gf2::GammaBasis basis(field, gamma.element);
  std::vector<Term> terms;
  for (std::size_t i = 0; i < q.size(); ++i) {
    terms.push_back({basis.coords_of(field.mul(q[i], scale)), static_cast<Residue>(i)});
  }
  DecodingPolynomial p = canonicalize(mod, basis.minimal_polynomial(), terms);
  if (p.k() > s.size() + 1 || !verify_decoding(p, s, field, gamma).valid) {
    fail(ErrorKind::kInternal, "canonical polynomial failed its self-check");
  }
  return p;
}

struct SearchLimits {
  /// Ceiling on estimated field operations; larger searches are refused.
  std::uint64_t ceiling = std::uint64_t{1} << 34;
  bool force = false;
  unsigned threads = 1;
};

inline constexpr unsigned kMaxSearchMonomials = 4;

/// Audit record of what an exhaustive search covered.
struct SearchCertificate {
  std::uint32_t m = 0;
  unsigned t = 0;
  unsigned max_k = 0;
  std::uint64_t supports = 0;     // exponent sets examined
  std::uint64_t evaluations = 0;  // field-operation estimate for the whole space
};

struct ExhaustiveResult {
  std::optional<DecodingPolynomial> poly;  // empty: certified nonexistent with <= max_k terms
  SearchCertificate certificate;
};

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (std::uint64_t{1} << 62)) return std::uint64_t{1} << 62;
  }
  return static_cast<std::uint64_t>(r);
}

/// Estimated field operations for a search up to max_k monomials.
inline std::uint64_t search_cost(std::uint32_t m, std::size_t s_size, unsigned max_k) {
  std::uint64_t total = 0;
  for (unsigned j = 1; j <= max_k; ++j) {
    const std::uint64_t rows = s_size + 1;
    total += binomial(m - 1, j - 1) * rows * j * (j + 1);
  }
  return total;
}

namespace detail {

/// Solves the decoding conditions for a fixed exponent support.
/// Returns coefficients when a solution with all-nonzero entries exists.
inline std::optional<std::vector<Elem>> solve_support(const gf2::Field& field,
                                                      std::span<const Elem> powers,
                                                      std::span<const Residue> s,
                                                      std::span<const Residue> support) {
  const std::uint32_t m = static_cast<std::uint32_t>(powers.size());
  const std::size_t cols = support.size();
  const std::size_t rows = s.size() + 1;
  // Augmented matrix; last row is sum a_l = 1.
  std::vector<Elem> a(rows * (cols + 1), field.zero());
  auto at = [&](std::size_t r, std::size_t c) -> Elem& { return a[r * (cols + 1) + c]; };
  for (std::size_t r = 0; r < s.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      at(r, c) = powers[zmod::mulmod(s[r], support[c], m)];
    }
  }
  for (std::size_t c = 0; c < cols; ++c) at(rows - 1, c) = field.one();
  at(rows - 1, cols) = field.one();

  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && at(piv, c) == field.zero()) ++piv;
    if (piv == rows) continue;
    for (std::size_t k = 0; k <= cols; ++k) std::swap(at(piv, k), at(rank, k));
    const Elem inv = field.inv(at(rank, c));
    for (std::size_t k = 0; k <= cols; ++k) at(rank, k) = field.mul(at(rank, k), inv);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || at(r, c) == field.zero()) continue;
      const Elem f = at(r, c);
      for (std::size_t k = 0; k <= cols; ++k) {
        at(r, k) = field.add(at(r, k), field.mul(f, at(rank, k)));
      }
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < rows; ++r) {
    if (at(r, cols) != field.zero()) return std::nullopt;
  }
  // Free variables at zero; a zero coefficient means a smaller support works.
  std::vector<Elem> sol(cols, field.zero());
  for (std::size_t r = 0; r < rank; ++r) sol[pivot_col[r]] = at(r, cols);
  for (Elem v : sol) {
    if (v == field.zero()) return std::nullopt;
  }
  return sol;
}

// Visits the (size)-subsets of [1, limit) in colex order; stops when f returns true.
inline bool for_each_colex(std::size_t size, Residue limit, std::vector<Residue>& buf,
                           const std::function<bool()>& f) {
  if (size == 0) return f();
  for (Residue top = static_cast<Residue>(size); top < limit; ++top) {
    buf.push_back(top);
    const bool stop = for_each_colex(size - 1, top, buf, f);
    buf.pop_back();
    if (stop) return true;
  }
  return false;
}

}  // namespace detail

/// Smallest S-decoding polynomial with at most max_k monomials, or a
/// certificate that none exists.
///
/// Multiplying by x^c preserves the decoding conditions, so every support is
/// shifted to contain exponent 0. Supports of each size are visited in colex
/// order and the first one whose linear system has an all-nonzero solution
/// wins; at the minimal size that solution is unique.
inline ExhaustiveResult exhaustive_search(std::span<const Residue> s_in, const gf2::Field& field,
                                          const gf2::OrderMElement& gamma, unsigned max_k,
                                          const SearchLimits& limits = {}) {
  require(max_k >= 1 && max_k <= kMaxSearchMonomials,
          "max monomials must be in [1, 4], got " + std::to_string(max_k));
  const std::uint32_t m = gamma.m;
  const zmod::Modulus mod = zmod::factorize(m);
  const std::vector<Residue> s = normalize_points(m, s_in);
  const std::uint64_t cost = search_cost(m, s.size(), max_k);
  if (cost > limits.ceiling && !limits.force) {
    fail(ErrorKind::kLimitExceeded, "search space of ~" + std::to_string(cost) +
                                        " field operations exceeds the ceiling of " +
                                        std::to_string(limits.ceiling));
  }

  const gf2::GammaBasis basis(field, gamma.element);
  std::vector<Elem> powers(m);
  {
    Elem g = field.one();
    for (Residue e = 0; e < m; ++e, g = field.mul(g, gamma.element)) powers[e] = g;
  }

  ExhaustiveResult result;
  result.certificate = {m, field.degree(), max_k, 0, cost};
  std::atomic<std::uint64_t> supports{0};

  auto finish = [&](std::span<const Residue> support, std::span<const Elem> coefs) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < support.size(); ++j) {
      terms.push_back({basis.coords_of(coefs[j]), support[j]});
    }
    DecodingPolynomial p = canonicalize(mod, basis.minimal_polynomial(), terms);
    if (!verify_decoding(p, s, field, gamma).valid) {
      fail(ErrorKind::kInternal, "exhaustive search produced an invalid polynomial");
    }
    return p;
  };

  for (unsigned size = 1; size <= max_k; ++size) {
    if (size == 1) {
      ++supports;
      const Residue zero[] = {0};
      if (auto sol = detail::solve_support(field, powers, s, zero)) {
        result.poly = finish(zero, *sol);
        break;
      }
      continue;
    }
    // Parallel over the largest exponent; the smallest successful one wins.
    std::atomic<Residue> next_top{static_cast<Residue>(size - 1)};
    std::mutex mu;
    Residue best_top = m;
    std::vector<Residue> best_support;
    std::vector<Elem> best_coefs;
    auto worker = [&] {
      std::vector<Residue> buf;
      for (;;) {
        const Residue top = next_top.fetch_add(1);
        if (top >= m) return;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (top > best_top) return;
        }
        buf.clear();
        std::vector<Residue> found_support;
        std::vector<Elem> found_coefs;
        detail::for_each_colex(size - 2, top, buf, [&] {
          ++supports;
          std::vector<Residue> support{0};
          support.insert(support.end(), buf.rbegin(), buf.rend());
          support.push_back(top);
          auto sol = detail::solve_support(field, powers, s, support);
          if (!sol) return false;
          found_support = std::move(support);
          found_coefs = std::move(*sol);
          return true;
        });
        if (!found_support.empty()) {
          std::lock_guard<std::mutex> lock(mu);
          if (top < best_top) {
            best_top = top;
            best_support = std::move(found_support);
            best_coefs = std::move(found_coefs);
          }
        }
      }
    };
    const unsigned threads = std::max(1u, limits.threads);
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (!best_support.empty()) {
      result.poly = finish(best_support, best_coefs);
      break;
    }
  }
  result.certificate.supports = supports.load();
  return result;
}

/// A 3-monomial S_511-decoding polynomial
/// gamma^423 x^65 + gamma^257 x^12 + gamma^342 over F_2[gamma]/(gamma^9+gamma^4+1).
inline DecodingPolynomial known_511_polynomial() {
  const gf2::Field field(9, Poly{0x211});
  const Elem gamma = field.x();
  const gf2::GammaBasis basis(field, gamma);
  const Term terms[] = {
      {basis.coords_of(field.pow(gamma, 423)), 65},
      {basis.coords_of(field.pow(gamma, 257)), 12},
      {basis.coords_of(field.pow(gamma, 342)), 0},
  };
  return canonicalize(zmod::factorize(511), 0x211, terms);
}

enum class HuntVerdict { kFound, kNonexistent, kRefused, kError };

inline std::string_view to_string(HuntVerdict v) {
  switch (v) {
    case HuntVerdict::kFound:
      return "found";
    case HuntVerdict::kNonexistent:
      return "nonexistent";
    case HuntVerdict::kRefused:
      return "budget_exceeded";
    case HuntVerdict::kError:
      return "error";
  }
  return "unknown";
}

struct HuntEntry {
  std::uint64_t m = 0;
  HuntVerdict verdict = HuntVerdict::kError;
  std::optional<DecodingPolynomial> poly;
  SearchCertificate certificate;
  std::string detail;
};

/// Runs exhaustive_search with S = S_m in GF(2^ord_m(2)) for one modulus.
inline HuntEntry hunt_one(std::uint64_t m, unsigned max_k, const SearchLimits& limits) {
  HuntEntry entry;
  entry.m = m;
  try {
    const zmod::Modulus mod = zmod::factorize(m);
    const std::uint32_t t = gf2::mult_order_of_2(mod);
    if (t > gf2::kMaxDegree) {
      fail(ErrorKind::kLimitExceeded,
           "field degree " + std::to_string(t) + " exceeds " + std::to_string(gf2::kMaxDegree));
    }
    const gf2::Field field(t);
    const gf2::OrderMElement gamma = gf2::find_order_m_element(field, m);
    const zmod::CanonicalSet s = zmod::canonical_set(mod);
    ExhaustiveResult r = exhaustive_search(s.elements(), field, gamma, max_k, limits);
    entry.certificate = r.certificate;
    entry.verdict = r.poly ? HuntVerdict::kFound : HuntVerdict::kNonexistent;
    entry.poly = std::move(r.poly);
  } catch (const Error& e) {
    entry.verdict = e.kind() == ErrorKind::kLimitExceeded ? HuntVerdict::kRefused
                                                          : HuntVerdict::kError;
    entry.detail = e.what();
  }
  return entry;
}

/// Batch driver; `done` reports each verdict as it lands (for checkpointing).
inline std::vector<HuntEntry> hunt(std::span<const std::uint64_t> candidates, unsigned max_k,
                                   const SearchLimits& limits,
                                   const std::function<void(const HuntEntry&)>& done = {}) {
  std::vector<HuntEntry> out;
  for (std::uint64_t m : candidates) {
    out.push_back(hunt_one(m, max_k, limits));
    if (done) done(out.back());
  }
  return out;
}

}  // namespace mvldc::decpoly
